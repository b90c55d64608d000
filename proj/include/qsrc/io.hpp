#pragma once

#include "qsrc/channels.hpp"
#include "qsrc/ensembles.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace qsrc::io {

/// Malformed input files (bad JSON, missing keys, wrong shapes). Invariant
/// violations inside otherwise well-formed files surface as
/// std::invalid_argument from the value-type constructors.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// FNV-1a 64-bit hex digest, used to tag reports with their inputs.
std::string digest_hex(std::string_view data);

/// Ensemble files: {"dim": k, "states": [[[re,im],...],...], "probs": [...]}.
Ensemble load_ensemble(const std::filesystem::path& path);
void save_ensemble(const Ensemble& e, const std::filesystem::path& path);

/// Instrument/channel files:
/// {"in_dim": d, "out_dim": d', "outcomes": [{"label": s, "kraus": [m,...]},...]}
/// with each matrix a row-major array of [re,im] pairs.
Instrument load_instrument(const std::filesystem::path& path);
void save_instrument(const Instrument& ins, const std::filesystem::path& path);
KrausChannel load_channel(const std::filesystem::path& path);

/// Fixed-format float that round-trips doubles; keeps CSV bodies stable.
std::string format_number(double v);

/// CSV emitter: one optional '#' comment line (timestamps and run notes go
/// there), then a header row, then data rows.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
            const std::string& comment = "");

  void row(const std::vector<std::string>& fields);

private:
  std::ofstream out_;
  size_t columns_;
};

}  // namespace qsrc::io

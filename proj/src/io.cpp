#include "qsrc/io.hpp"

#include <json.hpp>

#include <cstdio>

namespace qsrc::io {

using nlohmann::json;

std::string digest_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ParseError("malformed JSON in " + path.string() + ": " + ex.what());
  }
  return j;
}

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": complex entries must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json dump_complex(const Complex& c) { return json::array({c.real(), c.imag()}); }

Matrix parse_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                    const std::string& where) {
  if (!j.is_array() || j.size() != static_cast<size_t>(rows * cols))
    throw ParseError(where + ": expected row-major matrix of " +
                     std::to_string(rows * cols) + " entries");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = parse_complex(j[static_cast<size_t>(r * cols + c)], where);
  return m;
}

json dump_matrix(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(dump_complex(m(r, c)));
  return out;
}

}  // namespace

Ensemble load_ensemble(const std::filesystem::path& path) {
  const json j = parse_file(path);
  if (!j.is_object() || !j.contains("dim") || !j.contains("states") || !j.contains("probs"))
    throw ParseError(path.string() + ": ensemble needs dim, states, probs");
  if (!j["dim"].is_number_integer() || !j["states"].is_array() || !j["probs"].is_array())
    throw ParseError(path.string() + ": bad ensemble field types");
  const auto dim = j["dim"].get<Eigen::Index>();
  if (dim <= 0) throw ParseError(path.string() + ": dim must be positive");

  std::vector<StateVector> states;
  for (const auto& sj : j["states"]) {
    if (!sj.is_array() || sj.size() != static_cast<size_t>(dim))
      throw ParseError(path.string() + ": state with wrong amplitude count");
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      v[i] = parse_complex(sj[static_cast<size_t>(i)], path.string());
    states.emplace_back(std::move(v));  // throws std::invalid_argument if not unit norm
  }
  std::vector<double> probs;
  for (const auto& pj : j["probs"]) {
    if (!pj.is_number()) throw ParseError(path.string() + ": probs must be numbers");
    probs.push_back(pj.get<double>());
  }
  return Ensemble(std::move(states), std::move(probs));
}

void save_ensemble(const Ensemble& e, const std::filesystem::path& path) {
  json j;
  j["dim"] = e.dim();
  j["probs"] = e.probs;
  json states = json::array();
  for (const auto& s : e.states) {
    json amps = json::array();
    for (Eigen::Index i = 0; i < s.dim(); ++i) amps.push_back(dump_complex(s.amplitudes()[i]));
    states.push_back(std::move(amps));
  }
  j["states"] = std::move(states);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

Instrument load_instrument(const std::filesystem::path& path) {
  const json j = parse_file(path);
  if (!j.is_object() || !j.contains("in_dim") || !j.contains("out_dim") ||
      !j.contains("outcomes"))
    throw ParseError(path.string() + ": instrument needs in_dim, out_dim, outcomes");
  if (!j["in_dim"].is_number_integer() || !j["out_dim"].is_number_integer() ||
      !j["outcomes"].is_array() || j["outcomes"].empty())
    throw ParseError(path.string() + ": bad instrument field types");
  const auto in_dim = j["in_dim"].get<Eigen::Index>();
  const auto out_dim = j["out_dim"].get<Eigen::Index>();
  if (in_dim <= 0 || out_dim <= 0)
    throw ParseError(path.string() + ": dimensions must be positive");

  std::vector<Instrument::Branch> branches;
  for (const auto& oj : j["outcomes"]) {
    if (!oj.is_object() || !oj.contains("label") || !oj.contains("kraus") ||
        !oj["label"].is_string() || !oj["kraus"].is_array() || oj["kraus"].empty())
      throw ParseError(path.string() + ": each outcome needs label and kraus list");
    Instrument::Branch b;
    b.label = oj["label"].get<std::string>();
    for (const auto& mj : oj["kraus"])
      b.kraus.push_back(parse_matrix(mj, out_dim, in_dim, path.string()));
    branches.push_back(std::move(b));
  }
  return Instrument(std::move(branches));
}

void save_instrument(const Instrument& ins, const std::filesystem::path& path) {
  json j;
  j["in_dim"] = ins.in_dim();
  j["out_dim"] = ins.out_dim();
  json outcomes = json::array();
  for (const auto& b : ins.branches) {
    json oj;
    oj["label"] = b.label;
    json kraus = json::array();
    for (const auto& k : b.kraus) kraus.push_back(dump_matrix(k));
    oj["kraus"] = std::move(kraus);
    outcomes.push_back(std::move(oj));
  }
  j["outcomes"] = std::move(outcomes);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

KrausChannel load_channel(const std::filesystem::path& path) {
  return induced_channel(load_instrument(path));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header, const std::string& comment)
    : out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  if (!comment.empty()) out_ << "# " << comment << "\n";
  for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_)
    throw std::invalid_argument("CsvWriter: wrong field count");
  for (size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
  out_ << "\n";
}

}  // namespace qsrc::io

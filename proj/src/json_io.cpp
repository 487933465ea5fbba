#include "pdmcausal/json_io.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

namespace pdmcausal {

namespace {

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad field '") + key + "': " + e.what());
  }
}

std::vector<std::size_t> factors_or(const json& j, const char* key, std::vector<std::size_t> fallback) {
  return j.contains(key) ? get_field<std::vector<std::size_t>>(j, key) : std::move(fallback);
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  const std::size_t d = m.dim();
  json re = json::array(), im = json::array();
  for (std::size_t r = 0; r < d; ++r) {
    std::vector<double> rr(d), ri(d);
    for (std::size_t c = 0; c < d; ++c) {
      rr[c] = m(r, c).real();
      ri[c] = m(r, c).imag();
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"factors", m.factors()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  const auto re = get_field<std::vector<std::vector<double>>>(j, "re");
  const std::size_t d = re.size();
  std::vector<std::vector<double>> im(d, std::vector<double>(d, 0.0));
  if (j.contains("im")) im = get_field<std::vector<std::vector<double>>>(j, "im");
  if (d == 0 || im.size() != d) throw std::invalid_argument("matrix: 're' and 'im' must be square and equal in size");
  const auto factors = factors_or(j, "factors", {d});
  ComplexMatrix m(factors);
  if (m.dim() != d) throw std::invalid_argument("matrix: factors do not multiply to the row count");
  for (std::size_t r = 0; r < d; ++r) {
    if (re[r].size() != d || im[r].size() != d) throw std::invalid_argument("matrix: ragged rows");
    for (std::size_t c = 0; c < d; ++c) m(r, c) = Complex(re[r][c], im[r][c]);
  }
  return m;
}

json state_to_json(const QuantumState& s) {
  json j = matrix_to_json(s.mat);
  j["labels"] = s.labels;
  return j;
}

QuantumState state_from_json(const json& j) {
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = get_field<std::vector<std::string>>(j, "labels");
  return QuantumState::from_matrix(matrix_from_json(j), std::move(labels));
}

json channel_to_json(const QuantumChannel& ch) {
  json j{{"dim_in", ch.dim_in()},
         {"dim_out", ch.dim_out()},
         {"in_factors", ch.in_factors()},
         {"out_factors", ch.out_factors()}};
  if (const auto* k = std::get_if<KrausRep>(&ch.rep())) {
    j["rep"] = "kraus";
    j["operators"] = json::array();
    for (const auto& op : k->ops) j["operators"].push_back(matrix_to_json(op));
  } else if (const auto* u = std::get_if<UnitaryRep>(&ch.rep())) {
    j["rep"] = "unitary";
    j["matrix"] = matrix_to_json(u->u);
  } else {
    j["rep"] = "choi";
    j["matrix"] = matrix_to_json(std::get<ChoiRep>(ch.rep()).m);
  }
  return j;
}

QuantumChannel channel_from_json(const json& j) {
  if (j.is_string()) return named_channel(j.get<std::string>());
  const auto rep = get_field<std::string>(j, "rep");
  const auto dim_in = get_field<std::size_t>(j, "dim_in");
  const auto dim_out = get_field<std::size_t>(j, "dim_out");
  const auto in_f = factors_or(j, "in_factors", {dim_in});
  const auto out_f = factors_or(j, "out_factors", {dim_out});
  const auto prod = [](const std::vector<std::size_t>& f) {
    return std::accumulate(f.begin(), f.end(), std::size_t{1}, std::multiplies<>());
  };
  if (prod(in_f) != dim_in || prod(out_f) != dim_out)
    throw std::invalid_argument("channel: factors disagree with dim_in/dim_out");

  if (rep == "choi") {
    return QuantumChannel::choi(matrix_from_json(get_field<json>(j, "matrix")), in_f, out_f);
  }
  if (dim_in != dim_out) throw std::invalid_argument("channel: kraus/unitary need dim_in == dim_out");
  if (rep == "unitary") {
    ComplexMatrix u = matrix_from_json(get_field<json>(j, "matrix"));
    if (u.dim() != dim_in) throw std::invalid_argument("channel: unitary size disagrees with dim_in");
    return QuantumChannel::unitary(u.with_factors(in_f));
  }
  if (rep == "kraus") {
    std::vector<ComplexMatrix> ops;
    for (const auto& op : get_field<json>(j, "operators")) ops.push_back(matrix_from_json(op));
    return QuantumChannel::kraus(std::move(ops), in_f);
  }
  throw std::invalid_argument("channel: unknown rep '" + rep + "'");
}

json pdm_to_json(const Pdm& r) {
  json j = matrix_to_json(r.mat());
  json slots = json::array();
  for (const auto& s : r.slots()) {
    json parties = json::array();
    for (const auto& p : s.parties) parties.push_back({{"name", p.name}, {"qubits", p.qubits}});
    slots.push_back({{"label", s.label}, {"qubits", s.qubits()}, {"parties", std::move(parties)}});
  }
  j["slots"] = std::move(slots);
  return j;
}

Pdm pdm_from_json(const json& j) {
  const ComplexMatrix m = matrix_from_json(j);
  std::vector<TimeSlot> slots;
  if (!j.contains("slots")) {
    for (std::size_t k = 0; k < m.num_factors(); ++k)
      slots.push_back({"t" + std::to_string(k + 1),
                       {{std::string(1, static_cast<char>('A' + k)), qubit_count(m.factors()[k])}}});
    return Pdm(m, std::move(slots));
  }
  for (const auto& s : get_field<json>(j, "slots")) {
    TimeSlot slot{get_field<std::string>(s, "label"), {}};
    if (s.contains("parties")) {
      for (const auto& p : get_field<json>(s, "parties"))
        slot.parties.push_back({get_field<std::string>(p, "name"), get_field<std::size_t>(p, "qubits")});
      if (s.contains("qubits") && get_field<std::size_t>(s, "qubits") != slot.qubits())
        throw std::invalid_argument("slot '" + slot.label + "': qubits disagree with its parties");
    } else {
      slot.parties.push_back({slot.label, get_field<std::size_t>(s, "qubits")});
    }
    slots.push_back(std::move(slot));
  }
  std::size_t total = 0;
  for (const auto& s : slots) total += s.qubits();
  if (total >= 8 * sizeof(std::size_t) || (std::size_t{1} << total) != m.dim())
    throw std::invalid_argument("PDM: slot qubits do not match the matrix size");
  return Pdm(m, std::move(slots));
}

json thresholds_to_json(const Thresholds& th) {
  return {{"eps_neg", th.eps_neg}, {"eps_pos", th.eps_pos}, {"rank_tol", th.rank_tol}};
}

json verdict_to_json(const CausalVerdict& v) {
  return {{"compatible", v.compatible},
          {"correlated", v.correlated},
          {"f", v.f},
          {"min_eig_forward", v.min_eig_forward},
          {"min_eig_reverse", v.min_eig_reverse},
          {"unique_forward", v.unique_forward},
          {"unique_reverse", v.unique_reverse},
          {"thresholds", thresholds_to_json(v.thresholds)}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace pdmcausal

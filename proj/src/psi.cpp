#include "pp/psi.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pp {

namespace {

void validate(const PsiFunction& f) {
  if (f.kappa < 1) throw std::invalid_argument("psi: kappa must be a positive integer");
  if (f.l < 1) throw std::invalid_argument("psi: l must be a positive integer");
  switch (f.kind) {
    case PsiKind::power:
    case PsiKind::logpow:
      if (!(f.c > 0)) throw std::invalid_argument("psi: c must be > 0");
      if (f.s < 0 || f.t < 0) throw std::invalid_argument("psi: exponents must be >= 0");
      break;
    case PsiKind::table:
      if (f.table.empty()) throw std::invalid_argument("psi: empty table");
      for (double v : f.table)
        if (!(v > 0)) throw std::invalid_argument("psi: table values must be > 0");
      break;
  }
}

double base_eval(const PsiFunction& f, std::int64_t x) {
  switch (f.kind) {
    case PsiKind::power:
      return f.c * std::pow(static_cast<double>(x), -f.s);
    case PsiKind::logpow:
      return f.c / (std::pow(static_cast<double>(x), f.s) * std::pow(std::log(static_cast<double>(x) + 1.0), f.t));
    case PsiKind::table: {
      const auto i = static_cast<std::size_t>(x) - 1;
      return i < f.table.size() ? f.table[i] : f.table.back();
    }
  }
  throw std::logic_error("psi: unknown kind");
}

double powi(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

double series_term(const PsiFunction& f, int m, int n, std::int64_t j) {
  return powi(static_cast<double>(j), m - 1) * powi(psi_eval(f, j), n);
}

}  // namespace

PsiFunction make_power_psi(double c, double s) {
  PsiFunction f;
  f.kind = PsiKind::power;
  f.c = c;
  f.s = s;
  validate(f);
  return f;
}

PsiFunction make_logpow_psi(double c, double s, double t) {
  PsiFunction f;
  f.kind = PsiKind::logpow;
  f.c = c;
  f.s = s;
  f.t = t;
  validate(f);
  return f;
}

PsiFunction make_table_psi(std::vector<double> values) {
  PsiFunction f;
  f.kind = PsiKind::table;
  f.table = std::move(values);
  validate(f);
  return f;
}

double psi_eval(const PsiFunction& f, std::int64_t j) {
  if (j < 1) throw std::invalid_argument("psi: argument must be >= 1");
  if (f.kappa < 1 || f.l < 1) throw std::invalid_argument("psi: kappa and l must be positive integers");
  if (f.kind == PsiKind::table && f.table.empty()) throw std::invalid_argument("psi: empty table");
  return static_cast<double>(f.kappa) * base_eval(f, f.l * j);
}

bool check_decay_hypothesis(const PsiFunction& f, int m, int n, std::int64_t Jmax) {
  if (Jmax < 2) throw std::invalid_argument("check_decay_hypothesis: Jmax must be >= 2");
  double prev = series_term(f, m, n, 1);
  for (std::int64_t j = 2; j <= Jmax; ++j) {
    const double cur = series_term(f, m, n, j);
    if (cur > prev * (1.0 + 1e-12)) return false;
    prev = cur;
  }
  return true;
}

double series_partial_sum(const PsiFunction& f, int m, int n, std::int64_t Q) {
  if (Q < 1) throw std::invalid_argument("series_partial_sum: Q must be >= 1");
  double sum = 0.0, comp = 0.0;
  for (std::int64_t j = 1; j <= Q; ++j) {
    const double y = series_term(f, m, n, j) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

ScaledSeriesBound scaled_series_lower_bound(const PsiFunction& f, int m, int n, std::int64_t l,
                                            std::int64_t Q) {
  if (l < 1) throw std::invalid_argument("scaled_series_lower_bound: l must be >= 1");
  if (Q < l) throw std::invalid_argument("scaled_series_lower_bound: Q must be >= l");
  double sum = 0.0, comp = 0.0;
  for (std::int64_t j = l; j <= Q; ++j) {
    const double y = series_term(f, m, n, j) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  ScaledSeriesBound out;
  out.bound = sum * std::pow(static_cast<double>(l), -static_cast<double>(m));
  PsiFunction dilated = f;
  dilated.l *= l;
  out.dilated_partial_sum = series_partial_sum(dilated, m, n, Q / l);
  if (out.dilated_partial_sum < out.bound * (1.0 - 1e-9))
    throw std::logic_error("scaled series bound violated (is the decay hypothesis satisfied?)");
  return out;
}

std::string to_string(const PsiFunction& f) {
  std::ostringstream os;
  os.precision(17);
  switch (f.kind) {
    case PsiKind::power:
      os << "power:c=" << f.c << ",s=" << f.s;
      break;
    case PsiKind::logpow:
      os << "logpow:c=" << f.c << ",s=" << f.s << ",t=" << f.t;
      break;
    case PsiKind::table:
      os << "table:";
      for (std::size_t i = 0; i < f.table.size(); ++i) os << (i ? ";" : "") << f.table[i];
      break;
  }
  if (f.kappa != 1) os << ",kappa=" << f.kappa;
  if (f.l != 1) os << ",l=" << f.l;
  return os.str();
}

PsiFunction parse_psi(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("psi: expected kind:params in '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string params = spec.substr(colon + 1);

  PsiFunction f;
  auto parse_kv = [&f](const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("psi: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    if (key == "c")
      f.c = std::stod(val);
    else if (key == "s")
      f.s = std::stod(val);
    else if (key == "t")
      f.t = std::stod(val);
    else if (key == "kappa")
      f.kappa = std::stoll(val);
    else if (key == "l")
      f.l = std::stoll(val);
    else
      throw std::invalid_argument("psi: unknown key '" + key + "'");
  };

  if (kind == "power" || kind == "logpow") {
    f.kind = kind == "power" ? PsiKind::power : PsiKind::logpow;
    f.s = 0.0;
    std::istringstream ps(params);
    std::string item;
    while (std::getline(ps, item, ',')) parse_kv(item);
  } else if (kind == "table") {
    f.kind = PsiKind::table;
    std::string values = params;
    // scaling keys may trail the table payload
    auto comma = values.find(',');
    std::string suffix;
    if (comma != std::string::npos) {
      suffix = values.substr(comma + 1);
      values = values.substr(0, comma);
    }
    if (!values.empty() && values[0] == '@') {
      std::ifstream in(values.substr(1));
      if (!in) throw std::invalid_argument("psi: cannot open table file '" + values.substr(1) + "'");
      double v;
      while (in >> v) f.table.push_back(v);
    } else {
      std::istringstream vs(values);
      std::string item;
      while (std::getline(vs, item, ';')) f.table.push_back(std::stod(item));
    }
    if (!suffix.empty()) {
      std::istringstream ps(suffix);
      std::string item;
      while (std::getline(ps, item, ',')) parse_kv(item);
    }
  } else {
    throw std::invalid_argument("psi: unknown kind '" + kind + "'");
  }
  validate(f);
  return f;
}

}  // namespace pp

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace dtnf {

using Rational = boost::rational<std::int64_t>;

/// Raised when a parameter set violates one of its invariants. The message
/// lists every violated bound, one per line.
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which nodes may forward to a susceptible relay.
///  - epidemic: every infected node.
///  - two_hop: only the N0 sources and infected destinations.
enum class Relaying { epidemic, two_hop };

inline const char* to_string(Relaying mode) {
  return mode == Relaying::epidemic ? "epidemic" : "two-hop";
}

inline Relaying parse_relaying(std::string_view text) {
  if (text == "epidemic") return Relaying::epidemic;
  if (text == "two-hop" || text == "two_hop" || text == "twohop") return Relaying::two_hop;
  throw ParamError("unknown relaying mode '" + std::string(text) + "' (expected epidemic|two-hop)");
}

/// Parses "p/q" or a plain decimal ("0.8", "1e-1") into an exact rational.
/// Decimals are read digit by digit, so "0.8" is exactly 4/5.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw ParamError("cannot parse rational '" + std::string(text) + "'");
  };
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    try {
      std::size_t used = 0;
      const std::string num(text.substr(0, slash));
      const std::string den(text.substr(slash + 1));
      const long long p = std::stoll(num, &used);
      if (used != num.size()) return fail();
      const long long q = std::stoll(den, &used);
      if (used != den.size() || q == 0) return fail();
      return Rational(p, q);
    } catch (const std::logic_error&) {
      return fail();
    }
  }

  bool negative = false;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
  std::int64_t digits = 0;
  int scale = 0;
  bool seen_point = false, seen_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      if (digits > (std::numeric_limits<std::int64_t>::max() - 9) / 10) return fail();
      digits = digits * 10 + (c - '0');
      if (seen_point) ++scale;
      seen_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return fail();
  int exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return fail();
    try {
      std::size_t used = 0;
      const std::string rest(text.substr(i + 1));
      exponent = std::stoi(rest, &used);
      if (used != rest.size()) return fail();
    } catch (const std::logic_error&) {
      return fail();
    }
  }
  exponent -= scale;
  if (exponent > 18 || exponent < -18) return fail();
  std::int64_t power = 1;
  for (int k = 0; k < std::abs(exponent); ++k) power *= 10;
  Rational value = exponent >= 0 ? Rational(digits * power) : Rational(digits, power);
  return negative ? -value : value;
}

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator() << '/' << r.denominator();
  return os.str();
}

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

/// ceil(alpha * count) in integer arithmetic.
inline int ceil_fraction(const Rational& alpha, int count) {
  const std::int64_t num = alpha.numerator() * count;
  const std::int64_t den = alpha.denominator();
  std::int64_t q = num / den;
  if (num % den != 0 && num > 0) ++q;
  return static_cast<int>(q);
}

/// Finite network: M destinations, N relays of which N0 start infected,
/// a target fraction alpha of destinations, pairwise meeting rate lambda and
/// energy-to-delay conversion gamma.
struct NetworkParams {
  int M = 0;
  int N = 0;
  int N0 = 0;
  Rational alpha{1, 2};
  double lambda = 0.0;
  double gamma = 0.0;

  int K() const { return M + N; }
  int M_alpha() const { return ceil_fraction(alpha, M); }
};

namespace detail {
inline void throw_if_any(const std::vector<std::string>& problems, const char* what) {
  if (problems.empty()) return;
  std::string message = std::string("invalid ") + what + ":";
  for (const auto& p : problems) message += "\n  " + p;
  throw ParamError(message);
}
}  // namespace detail

/// Returns `params` unchanged iff every invariant holds; otherwise throws a
/// ParamError naming each failed bound.
inline NetworkParams validate(const NetworkParams& params) {
  std::vector<std::string> problems;
  if (params.M < 1) problems.emplace_back("M must be >= 1");
  if (params.N < 1) problems.emplace_back("N must be >= 1");
  if (params.N0 < 1) problems.emplace_back("N0 must be >= 1");
  if (params.N0 > params.N) problems.emplace_back("N0 must be <= N");
  if (params.alpha <= Rational(0)) problems.emplace_back("alpha must be > 0");
  if (params.alpha >= Rational(1)) problems.emplace_back("alpha must be < 1");
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda))
    problems.emplace_back("lambda must be > 0 and finite");
  if (!(params.gamma >= 0.0) || !std::isfinite(params.gamma))
    problems.emplace_back("gamma must be >= 0 and finite");
  if (problems.empty()) {
    const int m_alpha = params.M_alpha();
    if (m_alpha < 1 || m_alpha > params.M) problems.emplace_back("M_alpha = ceil(alpha*M) must lie in [1, M]");
  }
  detail::throw_if_any(problems, "network parameters");
  return params;
}

/// Fluid-limit description. `K` is the node count of the finite network the
/// parameters were derived from, or 0 for fluid-only workflows.
struct ScaledParams {
  int K = 0;
  double X = 0.0;
  double Y = 0.0;
  double Y0 = 0.0;
  double X_alpha = 0.0;
  double Lambda = 0.0;
  double Gamma = 0.0;
  Rational alpha{1, 2};

  /// Builds fluid parameters directly; skips the integer lattice constraints.
  static ScaledParams fluid_only(double X, double Y, double Y0, Rational alpha, double Lambda,
                                 double Gamma);
};

inline ScaledParams validate(const ScaledParams& s) {
  constexpr double tol = 1e-12;
  std::vector<std::string> problems;
  if (!(s.X > 0.0) || !(s.Y > 0.0)) problems.emplace_back("X and Y must be > 0");
  if (std::abs(s.X + s.Y - 1.0) > tol) problems.emplace_back("X + Y must equal 1");
  if (!(s.Y0 > 0.0)) problems.emplace_back("Y0 must be > 0");
  if (s.Y0 > s.Y + tol) problems.emplace_back("Y0 must be <= Y");
  if (s.alpha <= Rational(0) || s.alpha >= Rational(1)) problems.emplace_back("alpha must lie in (0, 1)");
  if (!(s.X_alpha > 0.0) || !(s.X_alpha < s.X)) problems.emplace_back("X_alpha must lie in (0, X)");
  if (!(s.Lambda > 0.0) || !std::isfinite(s.Lambda)) problems.emplace_back("Lambda must be > 0 and finite");
  if (!(s.Gamma >= 0.0) || !std::isfinite(s.Gamma)) problems.emplace_back("Gamma must be >= 0 and finite");
  if (s.K < 0) problems.emplace_back("K must be >= 0");
  detail::throw_if_any(problems, "scaled parameters");
  return s;
}

inline ScaledParams ScaledParams::fluid_only(double X, double Y, double Y0, Rational alpha,
                                             double Lambda, double Gamma) {
  ScaledParams s;
  s.K = 0;
  s.X = X;
  s.Y = Y;
  s.Y0 = Y0;
  s.alpha = alpha;
  s.X_alpha = to_double(alpha) * X;
  s.Lambda = Lambda;
  s.Gamma = Gamma;
  return validate(s);
}

inline ScaledParams scale(const NetworkParams& params) {
  validate(params);
  const double K = params.K();
  ScaledParams s;
  s.K = params.K();
  s.X = params.M / K;
  s.Y = params.N / K;
  s.Y0 = params.N0 / K;
  s.alpha = params.alpha;
  s.X_alpha = to_double(params.alpha) * params.M / K;
  s.Lambda = params.lambda * K;
  s.Gamma = params.gamma * K;
  return s;
}

/// Recovers the finite network with K nodes. K*X and K*Y0 must be integers
/// (to 1e-9).
inline NetworkParams unscale(const ScaledParams& s, int K) {
  if (K < 2) throw ParamError("unscale: K must be >= 2");
  auto to_count = [&](double fraction, const char* name) {
    const double v = fraction * K;
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)))
      throw ParamError(std::string("unscale: K*") + name + " is not an integer at K=" + std::to_string(K));
    return static_cast<int>(r);
  };
  NetworkParams p;
  p.M = to_count(s.X, "X");
  p.N = K - p.M;
  p.N0 = to_count(s.Y0, "Y0");
  p.alpha = s.alpha;
  p.lambda = s.Lambda / K;
  p.gamma = s.Gamma / K;
  return validate(p);
}

enum class MeetingType { destination, relay };
enum class Action : int { no_copy = 0, copy = 1 };

inline const char* to_string(MeetingType e) { return e == MeetingType::destination ? "d" : "r"; }

/// Lattice point (m, n) of infected destinations and relays, with the type of
/// the susceptible node met at a decision epoch when known.
struct EpidemicState {
  int m = 0;
  int n = 0;
  std::optional<MeetingType> e;

  double x(int K) const { return static_cast<double>(m) / K; }
  double y(int K) const { return static_cast<double>(n) / K; }
};

inline void check_state(const EpidemicState& s, const NetworkParams& p) {
  if (s.m < 0 || s.m > p.M || s.n < p.N0 || s.n > p.N)
    throw ParamError("state (" + std::to_string(s.m) + "," + std::to_string(s.n) + ") outside [0,M]x[N0,N]");
}

/// Rates of the two meeting channels at (m, n): an infected node meets a
/// susceptible destination, or a forwarding-capable node meets a susceptible
/// relay.
struct ChannelRates {
  double destination = 0.0;
  double relay = 0.0;
  double total() const { return destination + relay; }
};

inline ChannelRates channel_rates(int m, int n, const NetworkParams& p, Relaying mode) {
  ChannelRates r;
  r.destination = p.lambda * (m + n) * (p.M - m);
  const int forwarders = mode == Relaying::epidemic ? m + n : m + p.N0;
  r.relay = p.lambda * forwarders * (p.N - n);
  return r;
}

struct MeetingProbabilities {
  double destination = 0.0;
  double relay = 0.0;
};

/// Probability that the next susceptible node met is a destination / relay.
/// Under epidemic relaying these are (M-m)/(M+N-m-n) and (N-n)/(M+N-m-n).
inline MeetingProbabilities meeting_probabilities(int m, int n, const NetworkParams& p,
                                                  Relaying mode = Relaying::epidemic) {
  if (m + n >= p.M + p.N) throw ParamError("meeting_probabilities: every node is infected");
  if (mode == Relaying::epidemic) {
    const double susceptible = p.M + p.N - m - n;
    return {(p.M - m) / susceptible, (p.N - n) / susceptible};
  }
  const ChannelRates r = channel_rates(m, n, p, mode);
  if (!(r.total() > 0.0)) throw ParamError("meeting_probabilities: no susceptible node is reachable");
  return {r.destination / r.total(), r.relay / r.total()};
}

}  // namespace dtnf

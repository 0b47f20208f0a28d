#include "fermiqft/processes.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fqft {

bool ProcessSignature::is_created(std::size_t species) const { return position(species) < p; }

std::size_t ProcessSignature::position(std::size_t species) const {
  auto it = std::find(order.begin(), order.end(), species);
  if (it == order.end()) throw std::out_of_range("species not part of process signature");
  return static_cast<std::size_t>(it - order.begin());
}

std::string ProcessSignature::label() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < n; ++j) {
    if (j == p) os << ';';
    else if (j > 0) os << ',';
    os << order[j] + 1;
  }
  if (p == n) os << ';';
  os << ')';
  return os.str();
}

bool ProcessSignature::valid() const {
  if (p > n || order.size() != n) return false;
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < n; ++j)
    if (sorted[j] != j) return false;
  for (std::size_t j = 1; j < p; ++j)
    if (order[j - 1] >= order[j]) return false;
  for (std::size_t j = p + 1; j < n; ++j)
    if (order[j - 1] >= order[j]) return false;
  if (p >= 1 && p <= n - 1 && order[0] >= order[p]) return false;
  return true;
}

ProcessSignature parse_signature(std::size_t n, const std::string& label) {
  std::string s;
  for (char c : label)
    if (c != '(' && c != ')' && c != ' ') s.push_back(c);
  auto semi = s.find(';');
  if (semi == std::string::npos) throw std::invalid_argument("signature '" + label + "' lacks ';'");
  ProcessSignature sig;
  sig.n = n;
  auto read_list = [&](const std::string& part) {
    std::stringstream ss(part);
    std::string tok;
    std::size_t count = 0;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t v = std::stoul(tok);
      if (v == 0) throw std::invalid_argument("signature '" + label + "': species are numbered from 1");
      sig.order.push_back(v - 1);
      ++count;
    }
    return count;
  };
  sig.p = read_list(s.substr(0, semi));
  read_list(s.substr(semi + 1));
  if (!sig.valid()) throw std::invalid_argument("signature '" + label + "' is not an admissible process for n=" +
                                                std::to_string(n));
  return sig;
}

std::vector<ProcessSignature> enumerate_processes(std::size_t n, std::size_t p) {
  if (p > n) throw std::invalid_argument("enumerate_processes: p out of range");
  if (n == 0 || n > 20) throw std::invalid_argument("enumerate_processes: n out of range");
  std::vector<ProcessSignature> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != p) continue;
    ProcessSignature sig{n, p, {}};
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) sig.order.push_back(i);
    for (std::size_t i = 0; i < n; ++i)
      if (!(mask & (std::size_t{1} << i))) sig.order.push_back(i);
    if (sig.valid()) out.push_back(std::move(sig));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.order < b.order; });
  return out;
}

std::vector<ProcessSignature> enumerate_all_processes(std::size_t n) {
  std::vector<ProcessSignature> out;
  for (std::size_t p = 0; p <= n; ++p) {
    auto part = enumerate_processes(n, p);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::size_t process_count(std::size_t n, std::size_t p) {
  if (p > n) throw std::invalid_argument("process_count: p out of range");
  if (p == 0 || p == n) return 1;
  std::size_t k = p - 1, m = n - 1, c = 1;
  for (std::size_t j = 1; j <= k; ++j) c = c * (m - k + j) / j;
  return c;
}

}  // namespace fqft

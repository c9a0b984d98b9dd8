#include "ashape/partitions.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ashape::sf {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    for (size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i] <= 0)
            throw std::invalid_argument("Partition: parts must be positive");
        if (i > 0 && parts_[i] > parts_[i - 1])
            throw std::invalid_argument("Partition: parts must be non-increasing");
    }
    weight_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

std::string Partition::to_string() const {
    if (parts_.empty()) return "0";
    std::ostringstream os;
    for (size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << ',';
        os << parts_[i];
    }
    return os.str();
}

Partition Partition::parse(const std::string& s) {
    if (s.empty() || s == "0") return Partition{};
    std::vector<int> parts;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) parts.push_back(std::stoi(tok));
    return Partition(std::move(parts));
}

bool dominated_by(const Partition& a, const Partition& b) {
    if (a.weight() != b.weight())
        throw std::invalid_argument("dominated_by: weights differ");
    int sa = 0, sb = 0;
    const int len = std::max(a.length(), b.length());
    for (int i = 1; i <= len; ++i) {
        sa += a.part(i);
        sb += b.part(i);
        if (sa > sb) return false;
    }
    return true;
}

namespace {

void gen(int remaining, int max_part, int slots, std::vector<int>& acc,
         std::vector<Partition>& out) {
    if (remaining == 0) {
        out.emplace_back(acc);
        return;
    }
    if (slots == 0) return;
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        // a feasibility cut: the remaining slots must be able to absorb the rest
        if (static_cast<long long>(p) * slots < remaining) break;
        acc.push_back(p);
        gen(remaining - p, p, slots - 1, acc, out);
        acc.pop_back();
    }
}

}  // namespace

std::vector<Partition> partitions_of(int k, int max_parts) {
    if (k < 0) throw std::invalid_argument("partitions_of: k must be >= 0");
    if (max_parts < 1) throw std::invalid_argument("partitions_of: max_parts must be >= 1");
    std::vector<Partition> out;
    std::vector<int> acc;
    gen(k, k, max_parts, acc, out);
    if (k == 0) out.assign(1, Partition{});
    return out;
}

}  // namespace ashape::sf

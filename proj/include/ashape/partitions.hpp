#pragma once

#include <string>
#include <vector>

namespace ashape::sf {

// Non-increasing tuple of positive integers kappa = (k1 >= k2 >= ... >= 1);
// trailing zeros are implicit and the empty partition (weight 0) is valid.
class Partition {
  public:
    Partition() = default;
    explicit Partition(std::vector<int> parts);

    int weight() const { return weight_; }
    int length() const { return static_cast<int>(parts_.size()); }
    // 1-based row access with implicit zeros past the length
    int part(int i) const {
        return (i >= 1 && i <= length()) ? parts_[static_cast<size_t>(i) - 1] : 0;
    }
    const std::vector<int>& parts() const { return parts_; }

    std::string to_string() const;           // "3,1"; empty partition -> "0"
    static Partition parse(const std::string& s);

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.parts_ == b.parts_;
    }

  private:
    std::vector<int> parts_;
    int weight_ = 0;
};

// a <= b in dominance order (prefix sums of a never exceed those of b).
// Only meaningful for equal weights, which is asserted.
bool dominated_by(const Partition& a, const Partition& b);

// All partitions of k into at most max_parts parts, reverse-lexicographic
// ((4) before (3,1) before (2,2), ...).  k = 0 yields just the empty partition.
std::vector<Partition> partitions_of(int k, int max_parts);

}  // namespace ashape::sf

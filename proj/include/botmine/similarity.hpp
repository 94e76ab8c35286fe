#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace botmine {

struct MatchBlock {
    size_t a = 0, b = 0, size = 0;
};

// Ratcliff-Obershelp sequence matching over raw bytes. Longest-match ties
// break toward the smallest start in the first sequence, then the second.
class SequenceMatcher {
public:
    SequenceMatcher(std::string a, std::string b) : a_(std::move(a)), b_(std::move(b)) {
        for (size_t j = 0; j < b_.size(); ++j) {
            positions_[static_cast<unsigned char>(b_[j])].push_back(j);
        }
    }

    MatchBlock find_longest_match(size_t alo, size_t ahi, size_t blo, size_t bhi) const {
        MatchBlock best{alo, blo, 0};
        std::vector<size_t> run_len(b_.size() + 1, 0);
        std::vector<size_t> new_run(b_.size() + 1, 0);
        for (size_t i = alo; i < ahi; ++i) {
            const auto& js = positions_[static_cast<unsigned char>(a_[i])];
            std::fill(new_run.begin() + blo, new_run.begin() + bhi, 0);
            for (size_t j : js) {
                if (j < blo) continue;
                if (j >= bhi) break;
                size_t k = (j > blo ? run_len[j - 1] : 0) + 1;
                new_run[j] = k;
                if (k > best.size) best = {i - k + 1, j - k + 1, k};
            }
            std::swap(run_len, new_run);
        }
        return best;
    }

    std::vector<MatchBlock> matching_blocks() const {
        std::vector<MatchBlock> blocks;
        std::vector<std::array<size_t, 4>> queue{{0, a_.size(), 0, b_.size()}};
        while (!queue.empty()) {
            auto [alo, ahi, blo, bhi] = queue.back();
            queue.pop_back();
            MatchBlock m = find_longest_match(alo, ahi, blo, bhi);
            if (m.size == 0) continue;
            blocks.push_back(m);
            if (alo < m.a && blo < m.b) queue.push_back({alo, m.a, blo, m.b});
            if (m.a + m.size < ahi && m.b + m.size < bhi) {
                queue.push_back({m.a + m.size, ahi, m.b + m.size, bhi});
            }
        }
        return blocks;
    }

    // 2*M / (|a|+|b|); two empty sequences compare equal.
    double ratio() const {
        size_t total = a_.size() + b_.size();
        if (total == 0) return 1.0;
        size_t matched = 0;
        for (const auto& m : matching_blocks()) matched += m.size;
        return 2.0 * static_cast<double>(matched) / static_cast<double>(total);
    }

private:
    std::string a_, b_;
    std::array<std::vector<size_t>, 256> positions_;
};

inline double sequence_ratio(const std::string& a, const std::string& b) {
    return SequenceMatcher(a, b).ratio();
}

}  // namespace botmine

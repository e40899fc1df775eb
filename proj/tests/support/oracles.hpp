#pragma once

// Brute-force reference implementations used by property tests.

#include "ecoscapes/evaluation.hpp"
#include "ecoscapes/pipeline.hpp"
#include "ecoscapes/raster.hpp"
#include "ecoscapes/satellite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace oracle {

struct NdPixel {
    bool valid = false;
    long double value = 0;
};

inline std::vector<NdPixel> normalized_difference(const ecoscapes::raster::BandRaster& a,
                                                  const ecoscapes::raster::BandRaster& b) {
    std::vector<NdPixel> out(a.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!a.data_mask[i] || !b.data_mask[i]) continue;
        const long double x = a.values[i];
        const long double y = b.values[i];
        if (x + y == 0) continue;
        out[i] = {true, (x - y) / (x + y)};
    }
    return out;
}

inline ecoscapes::raster::BandRaster random_band(std::mt19937_64& rng, ecoscapes::raster::BandId id,
                                                 int w, int h, double nodata_rate = 0.05) {
    std::uniform_real_distribution<double> refl(0.0, 1.2);
    std::bernoulli_distribution missing(nodata_rate);
    std::bernoulli_distribution zero(0.02);
    ecoscapes::raster::BandRaster r;
    r.band = id;
    r.width = w;
    r.height = h;
    r.values.resize(static_cast<std::size_t>(w) * h);
    r.data_mask.resize(r.values.size());
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        r.values[i] = zero(rng) ? 0.0 : refl(rng);
        r.data_mask[i] = missing(rng) ? 0 : 1;
    }
    return r;
}

// Morphology with an explicit (2r+1)^2 window scan; out-of-image cells are ignored.
inline ecoscapes::raster::BinaryMask erode(const ecoscapes::raster::BinaryMask& m, int r) {
    ecoscapes::raster::BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (int dy = -r; dy <= r && all; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height) continue;
                    if (!m.at(nx, ny)) {
                        all = false;
                        break;
                    }
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

inline ecoscapes::raster::BinaryMask dilate(const ecoscapes::raster::BinaryMask& m, int r) {
    ecoscapes::raster::BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            bool any = false;
            for (int dy = -r; dy <= r && !any; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height) continue;
                    if (m.at(nx, ny)) {
                        any = true;
                        break;
                    }
                }
            }
            out.set(x, y, any);
        }
    }
    return out;
}

// 8-connected labelling by union-find.
inline ecoscapes::raster::BinaryMask drop_small(const ecoscapes::raster::BinaryMask& m,
                                                double min_pixels) {
    const int n = m.width * m.height;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.at(x, y)) continue;
            for (auto [dx, dy] : {std::pair{1, 0}, {0, 1}, {1, 1}, {-1, 1}}) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height || !m.at(nx, ny)) continue;
                parent[find(y * m.width + x)] = find(ny * m.width + nx);
            }
        }
    }
    std::map<int, int> area;
    for (int i = 0; i < n; ++i) {
        if (m.bits[i]) ++area[find(i)];
    }
    ecoscapes::raster::BinaryMask out(m.width, m.height);
    for (int i = 0; i < n; ++i) {
        if (m.bits[i] && !(area[find(i)] < min_pixels)) out.bits[i] = 1;
    }
    return out;
}

inline ecoscapes::raster::BinaryMask denoise(const ecoscapes::raster::BinaryMask& m, int radius,
                                             double min_area_fraction) {
    return oracle::drop_small(oracle::dilate(oracle::erode(m, radius), radius),
                      min_area_fraction * m.width * m.height);
}

inline std::vector<ecoscapes::satellite::SceneRef> discover(
    std::vector<ecoscapes::satellite::SceneRef> catalog,
    const ecoscapes::satellite::DateWindow& window, double max_cloud) {
    std::vector<ecoscapes::satellite::SceneRef> kept;
    for (const auto& s : catalog) {
        if (s.cloud_fraction < max_cloud && s.sensing_date >= window.from &&
            s.sensing_date <= window.to) {
            kept.push_back(s);
        }
    }
    // Selection sort: newest first, then by id.
    for (std::size_t i = 0; i < kept.size(); ++i) {
        std::size_t best = i;
        for (std::size_t j = i + 1; j < kept.size(); ++j) {
            const auto& a = kept[j];
            const auto& b = kept[best];
            if (a.sensing_date > b.sensing_date ||
                (a.sensing_date == b.sensing_date && a.scene_id < b.scene_id)) {
                best = j;
            }
        }
        std::swap(kept[i], kept[best]);
    }
    return kept;
}

// k-th smallest value (0-based) of a multiset over {0..5}, from counts.
inline int order_stat(const std::array<int, 6>& counts, int k) {
    int seen = 0;
    for (int v = 0; v < 6; ++v) {
        seen += counts[v];
        if (seen > k) return v;
    }
    return -1;
}

inline double median_of_ranks(const std::array<int, 6>& counts, int lo, int n) {
    if (n % 2 == 1) return order_stat(counts, lo + n / 2);
    return (order_stat(counts, lo + n / 2 - 1) + order_stat(counts, lo + n / 2)) / 2.0;
}

inline ecoscapes::evaluation::FiveNumberSummary summarize(std::span<const int> scores) {
    std::array<int, 6> counts{};
    for (int s : scores) ++counts[s];
    const int n = static_cast<int>(scores.size());
    ecoscapes::evaluation::FiveNumberSummary out;
    out.min = order_stat(counts, 0);
    out.max = order_stat(counts, n - 1);
    out.median = median_of_ranks(counts, 0, n);
    if (n == 1) {
        out.q1 = out.q3 = out.median;
        return out;
    }
    const int half = n / 2;
    out.q1 = median_of_ranks(counts, 0, half);
    out.q3 = median_of_ranks(counts, n - half, half);
    return out;
}

// Random DAG over ids "m0".."m{n-1}": edges only from lower to higher index
// (then ids are shuffled so order is not lexicographic), each edge hard or soft.
struct RandomDag {
    std::vector<std::string> ids;
    std::map<std::string, std::set<std::string>> hard;  // module -> deps
    std::map<std::string, std::set<std::string>> soft;
};

inline RandomDag random_dag(std::mt19937_64& rng, int n) {
    RandomDag g;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)) + "_mod");
    std::shuffle(names.begin(), names.end(), rng);
    g.ids = names;
    std::bernoulli_distribution edge(0.35), is_soft(0.3);
    for (int i = 0; i < n; ++i) {
        g.hard[names[i]];
        g.soft[names[i]];
        for (int j = 0; j < i; ++j) {
            if (!edge(rng)) continue;
            (is_soft(rng) ? g.soft : g.hard)[names[i]].insert(names[j]);
        }
    }
    return g;
}

inline bool order_respects_edges(const std::vector<std::string>& order, const RandomDag& g) {
    if (order.size() != g.ids.size()) return false;
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    if (pos.size() != order.size()) return false;
    for (const auto& id : g.ids) {
        if (!pos.count(id)) return false;
        for (const auto& d : g.hard.at(id)) {
            if (pos[d] >= pos[id]) return false;
        }
        for (const auto& d : g.soft.at(id)) {
            if (pos[d] >= pos[id]) return false;
        }
    }
    return true;
}

// Modules reachable from `failed` along hard edges (dependents of dependents).
inline std::set<std::string> hard_reachable(const RandomDag& g, const std::string& failed) {
    std::map<std::string, std::vector<std::string>> dependents;
    for (const auto& [id, deps] : g.hard) {
        for (const auto& d : deps) dependents[d].push_back(id);
    }
    std::set<std::string> seen;
    std::deque<std::string> queue{failed};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        for (const auto& next : dependents[cur]) {
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return seen;
}

}  // namespace oracle

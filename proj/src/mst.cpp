#include "dimscope/mst.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dimscope/error.hpp"
#include "dimscope/parallel.hpp"
#include "kd_tree.hpp"

namespace dimscope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kPrimCutoff = 2048;

// Total order on candidate edges: squared length, then (min index, max index).
struct EdgeKey {
    double d2 = kInf;
    std::uint32_t lo = kNone;
    std::uint32_t hi = kNone;

    static EdgeKey of(double d2, std::uint32_t a, std::uint32_t b) {
        return a < b ? EdgeKey{d2, a, b} : EdgeKey{d2, b, a};
    }
    bool operator<(const EdgeKey& o) const {
        if (d2 != o.d2) return d2 < o.d2;
        if (lo != o.lo) return lo < o.lo;
        return hi < o.hi;
    }
    bool valid() const { return lo != kNone; }
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

std::vector<Edge> finish(std::vector<EdgeKey> keys) {
    std::vector<Edge> edges;
    edges.reserve(keys.size());
    for (const auto& k : keys) edges.push_back(Edge{k.lo, k.hi, std::sqrt(k.d2)});
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
    return edges;
}

std::vector<EdgeKey> prim(const PointCloud& cloud) {
    const std::size_t n = cloud.n();
    const std::size_t d = cloud.d();
    std::vector<double> best(n, kInf);
    std::vector<std::uint32_t> partner(n, kNone);
    std::vector<char> in_tree(n, 0);
    std::vector<EdgeKey> keys;
    keys.reserve(n - 1);

    std::uint32_t current = 0;
    in_tree[0] = 1;
    for (std::size_t step = 1; step < n; ++step) {
        const double* x = cloud.row(current);
        EdgeKey next;
        std::uint32_t next_v = kNone;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const double d2 = detail::distance2(x, cloud.row(v), d);
            if (d2 < best[v] || (d2 == best[v] && EdgeKey::of(d2, current, v) < EdgeKey::of(d2, partner[v], v))) {
                best[v] = d2;
                partner[v] = current;
            }
            const EdgeKey key = EdgeKey::of(best[v], partner[v], v);
            if (key < next) {
                next = key;
                next_v = v;
            }
        }
        keys.push_back(next);
        in_tree[next_v] = 1;
        current = next_v;
    }
    return keys;
}

// Boruvka rounds; each component's cheapest outgoing edge comes from
// nearest-foreign-neighbour queries on a k-d tree. Subtrees lying entirely
// in the query's component are skipped, and a shared per-component bound
// prunes the rest.
class BoruvkaKdTree {
public:
    explicit BoruvkaKdTree(const PointCloud& cloud)
        : tree_(cloud.points().data(), cloud.n(), cloud.d()),
          n_(cloud.n()),
          uf_(cloud.n()),
          comp_(cloud.n()),
          node_comp_(tree_.nodes().size()),
          cache_(cloud.n()),
          cache_exact_(cloud.n(), 0),
          found_(cloud.n()),
          found_exact_(cloud.n(), 0) {}

    std::vector<EdgeKey> run() {
        std::vector<EdgeKey> keys;
        keys.reserve(n_ - 1);
        std::vector<EdgeKey> comp_best(n_);
        std::vector<double> comp_bound(n_);
        while (keys.size() + 1 < n_) {
            for (std::uint32_t p = 0; p < n_; ++p) comp_[p] = uf_.find(p);
            label_nodes();

            std::fill(comp_best.begin(), comp_best.end(), EdgeKey{});
            // Cached neighbours stay optimal while they remain foreign: the
            // set of foreign points only shrinks as components merge.
            for (std::uint32_t p = 0; p < n_; ++p) {
                const bool reuse = cache_exact_[p] && cache_[p].valid() && comp_[pos_of(cache_[p], p)] != comp_[p];
                found_exact_[p] = reuse ? 1 : 0;
                found_[p] = reuse ? cache_[p] : EdgeKey{};
                if (reuse && found_[p] < comp_best[comp_[p]]) comp_best[comp_[p]] = found_[p];
            }
            for (std::uint32_t p = 0; p < n_; ++p) comp_bound[p] = comp_best[p].d2;

            parallel_for(0, n_, [&](std::size_t p) {
                if (!found_exact_[p]) query(static_cast<std::uint32_t>(p), comp_bound);
            });

            for (std::uint32_t p = 0; p < n_; ++p) {
                cache_[p] = found_[p];
                cache_exact_[p] = found_exact_[p];
                if (found_[p].valid() && found_[p] < comp_best[comp_[p]]) comp_best[comp_[p]] = found_[p];
            }
            std::vector<EdgeKey> chosen;
            for (std::uint32_t c = 0; c < n_; ++c) {
                if (comp_[c] == c && comp_best[c].valid()) chosen.push_back(comp_best[c]);
            }
            std::sort(chosen.begin(), chosen.end());
            for (const EdgeKey& e : chosen) {
                if (uf_.unite(pos_[e.lo], pos_[e.hi])) keys.push_back(e);
            }
        }
        return keys;
    }

private:
    // Position in tree order for an original index. Built lazily.
    std::uint32_t pos_of(const EdgeKey& key, std::uint32_t self) const {
        const std::uint32_t other = key.lo == tree_.original(self) ? key.hi : key.lo;
        return pos_[other];
    }

    void label_nodes() {
        const auto& nodes = tree_.nodes();
        for (std::size_t i = nodes.size(); i-- > 0;) {
            const auto& nd = nodes[i];
            if (nd.left < 0) {
                std::uint32_t c = comp_[nd.begin];
                for (std::uint32_t p = nd.begin + 1; p < nd.end && c != kNone; ++p) {
                    if (comp_[p] != c) c = kNone;
                }
                node_comp_[i] = c;
            } else {
                const std::uint32_t a = node_comp_[static_cast<std::size_t>(nd.left)];
                const std::uint32_t b = node_comp_[static_cast<std::size_t>(nd.right)];
                node_comp_[i] = a == b ? a : kNone;
            }
        }
    }

    void query(std::uint32_t p, std::vector<double>& comp_bound) {
        const std::uint32_t c = comp_[p];
        const double* x = tree_.point(p);
        const std::size_t d = tree_.dim();
        const std::uint32_t self = tree_.original(p);
        std::atomic_ref<double> shared(comp_bound[c]);
        EdgeKey best;
        double floor = kInf;  // smallest shared bound that pruned anything

        const auto& nodes = tree_.nodes();
        struct Pending {
            std::uint32_t node;
            double dist2;
        };
        Pending stack[128];
        std::size_t top = 0;
        stack[top++] = {0, tree_.box_distance2(0, x)};
        while (top > 0) {
            const Pending item = stack[--top];
            if (node_comp_[item.node] == c) continue;
            const double group = shared.load(std::memory_order_relaxed);
            const double bound = std::min(group, best.d2);
            if (item.dist2 > bound) {
                if (group < best.d2) floor = std::min(floor, group);
                continue;
            }
            const auto& nd = nodes[item.node];
            if (nd.left < 0) {
                for (std::uint32_t q = nd.begin; q < nd.end; ++q) {
                    if (comp_[q] == c) continue;
                    const double d2 = detail::distance2(x, tree_.point(q), d);
                    if (d2 > best.d2) continue;
                    const EdgeKey key = EdgeKey::of(d2, self, tree_.original(q));
                    if (key < best) best = key;
                }
                if (best.valid()) {
                    double cur = shared.load(std::memory_order_relaxed);
                    while (best.d2 < cur && !shared.compare_exchange_weak(cur, best.d2, std::memory_order_relaxed)) {
                    }
                }
                continue;
            }
            const auto l = static_cast<std::uint32_t>(nd.left);
            const auto r = static_cast<std::uint32_t>(nd.right);
            const double dl = tree_.box_distance2(l, x);
            const double dr = tree_.box_distance2(r, x);
            // Push the farther child first so the nearer one is explored first.
            if (dl <= dr) {
                stack[top++] = {r, dr};
                stack[top++] = {l, dl};
            } else {
                stack[top++] = {l, dl};
                stack[top++] = {r, dr};
            }
        }
        found_[p] = best;
        found_exact_[p] = best.valid() && best.d2 <= floor ? 1 : 0;
    }

public:
    void index_positions() {
        pos_.assign(n_, 0);
        for (std::uint32_t p = 0; p < n_; ++p) pos_[tree_.original(p)] = p;
    }

private:
    detail::KdTree tree_;
    std::uint32_t n_;
    UnionFind uf_;
    std::vector<std::uint32_t> comp_;
    std::vector<std::uint32_t> node_comp_;
    std::vector<EdgeKey> cache_;
    std::vector<char> cache_exact_;
    std::vector<EdgeKey> found_;
    std::vector<char> found_exact_;
    std::vector<std::uint32_t> pos_;
};

std::vector<EdgeKey> boruvka(const PointCloud& cloud) {
    BoruvkaKdTree solver(cloud);
    solver.index_positions();
    return solver.run();
}

}  // namespace

MinimumSpanningTree::MinimumSpanningTree(std::size_t n, std::vector<Edge> edges, Provenance source)
    : n_(n), edges_(std::move(edges)), source_(std::move(source)) {
    if (edges_.size() + 1 != n_) throw InvalidArgument("spanning tree on n vertices needs n - 1 edges");
}

double MinimumSpanningTree::total_weight() const {
    double total = 0.0;
    for (const Edge& e : edges_) total += e.weight;
    return total;
}

std::vector<double> MinimumSpanningTree::weights() const {
    std::vector<double> w;
    w.reserve(edges_.size());
    for (const Edge& e : edges_) w.push_back(e.weight);
    return w;
}

std::vector<std::uint32_t> MinimumSpanningTree::degrees() const {
    std::vector<std::uint32_t> deg(n_, 0);
    for (const Edge& e : edges_) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

MinimumSpanningTree build_emst(const PointCloud& cloud, MstAlgorithm algorithm) {
    const std::size_t n = cloud.n();
    if (n < 2) throw InvalidArgument("build_emst: need at least 2 points, got " + std::to_string(n));
    if (n >= kNone) throw InvalidArgument("build_emst: too many points");
    if (algorithm == MstAlgorithm::automatic) {
        // Below a few thousand points the dense scan wins even for
        // low-dimensional data, and it is immune to high intrinsic dimension.
        algorithm = n <= kPrimCutoff ? MstAlgorithm::prim : MstAlgorithm::boruvka_kdtree;
    }
    std::vector<EdgeKey> keys = algorithm == MstAlgorithm::prim ? prim(cloud) : boruvka(cloud);
    return MinimumSpanningTree(n, finish(std::move(keys)), cloud.meta());
}

double edge_power_sum(std::span<const double> weights, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("edge_power_sum: alpha must be > 0");
    double total = 0.0;
    for (double w : weights) {
        if (w > 0.0) total += std::pow(w, alpha);
    }
    return total;
}

double edge_power_sum(const MinimumSpanningTree& tree, double alpha) {
    const auto w = tree.weights();
    return edge_power_sum(w, alpha);
}

double degree_statistic(const MinimumSpanningTree& tree) {
    double total = 0.0;
    for (std::uint32_t k : tree.degrees()) total += static_cast<double>(k) * static_cast<double>(k);
    return total / static_cast<double>(tree.n());
}

std::vector<std::size_t> degree_histogram(const MinimumSpanningTree& tree) {
    std::vector<std::size_t> hist;
    for (std::uint32_t k : tree.degrees()) {
        if (k >= hist.size()) hist.resize(k + 1, 0);
        ++hist[k];
    }
    return hist;
}

}  // namespace dimscope

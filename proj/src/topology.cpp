#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ctagg/ctsim.hpp"
#include "ctagg/rng.hpp"

namespace ctagg::ctsim {

namespace {

void check_prob(double p, const std::string& what) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument(what + " must be in (0, 1], got " + std::to_string(p));
}

}  // namespace

Topology Topology::create(std::vector<NodeId> nodes, std::vector<Edge> edges, NodeId initiator,
                          double global_success_prob) {
    if (nodes.empty()) throw std::invalid_argument("topology: empty node list");
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw std::invalid_argument("topology: duplicate node id");
    if (nodes.front() == 0) throw std::invalid_argument("topology: node ids are 1-based");
    check_prob(global_success_prob, "topology: link success probability");

    std::set<NodeId> node_set(nodes.begin(), nodes.end());
    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto& e : edges) {
        if (e.a == e.b)
            throw std::invalid_argument("topology: self-loop on node " + std::to_string(e.a));
        if (!node_set.count(e.a) || !node_set.count(e.b))
            throw std::invalid_argument("topology: edge references unknown node");
        if (e.a > e.b) std::swap(e.a, e.b);
        if (!seen.emplace(e.a, e.b).second)
            throw std::invalid_argument("topology: duplicate edge " + std::to_string(e.a) + "-" +
                                        std::to_string(e.b));
        if (e.success_prob) check_prob(*e.success_prob, "topology: per-edge success probability");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });

    if (initiator == 0) initiator = nodes.front();
    if (!node_set.count(initiator))
        throw std::invalid_argument("topology: initiator " + std::to_string(initiator) +
                                    " is not a node");

    Topology t;
    t.nodes_ = std::move(nodes);
    t.edges_ = std::move(edges);
    t.initiator_ = initiator;
    t.global_success_prob_ = global_success_prob;
    t.build_links();

    // connectivity check (BFS from the first node)
    if (t.size() > 1) {
        std::vector<char> visited(t.size(), 0);
        std::queue<std::size_t> q;
        q.push(0);
        visited[0] = 1;
        std::size_t reached = 1;
        std::vector<std::vector<std::size_t>> adj(t.size());
        for (const auto& l : t.links_) adj[l.from].push_back(l.to);
        while (!q.empty()) {
            auto u = q.front();
            q.pop();
            for (auto v : adj[u]) {
                if (!visited[v]) {
                    visited[v] = 1;
                    ++reached;
                    q.push(v);
                }
            }
        }
        if (reached != t.size())
            throw std::invalid_argument("topology: graph is not connected (" + std::to_string(reached) +
                                        " of " + std::to_string(t.size()) + " nodes reachable)");
    }
    return t;
}

void Topology::build_links() {
    links_.clear();
    links_.reserve(edges_.size() * 2);
    for (const auto& e : edges_) {
        double p = e.success_prob.value_or(global_success_prob_);
        auto ia = static_cast<std::uint32_t>(index_of(e.a));
        auto ib = static_cast<std::uint32_t>(index_of(e.b));
        links_.push_back({ia, ib, p});
        links_.push_back({ib, ia, p});
    }
    std::sort(links_.begin(), links_.end(), [](const DirectedLink& x, const DirectedLink& y) {
        return std::tie(x.from, x.to) < std::tie(y.from, y.to);
    });
}

std::size_t Topology::index_of(NodeId id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id)
        throw std::invalid_argument("topology: unknown node id " + std::to_string(id));
    return static_cast<std::size_t>(it - nodes_.begin());
}

Topology Topology::with_global_success_prob(double p) const {
    check_prob(p, "topology: link success probability");
    Topology t(*this);
    t.global_success_prob_ = p;
    t.build_links();
    return t;
}

unsigned Topology::diameter() const {
    std::vector<std::vector<std::size_t>> adj(size());
    for (const auto& l : links_) adj[l.from].push_back(l.to);
    unsigned diam = 0;
    for (std::size_t s = 0; s < size(); ++s) {
        std::vector<int> dist(size(), -1);
        std::queue<std::size_t> q;
        q.push(s);
        dist[s] = 0;
        while (!q.empty()) {
            auto u = q.front();
            q.pop();
            for (auto v : adj[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
            }
        }
        for (auto d : dist) diam = std::max(diam, static_cast<unsigned>(d));
    }
    return diam;
}

Topology parse_topology(std::istream& in, double global_success_prob) {
    std::string line;
    unsigned line_no = 0;
    std::optional<unsigned> n;
    std::vector<Topology::Edge> edges;
    NodeId initiator = 0;

    auto fail = [&](const std::string& msg) -> void {
        throw std::runtime_error("topology parse error at line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;  // blank / comment-only

        if (tok == "nodes") {
            long v = -1;
            if (!(ss >> v) || v < 1) fail("expected 'nodes <n>' with n >= 1");
            if (n) fail("duplicate 'nodes' header");
            n = static_cast<unsigned>(v);
        } else if (tok == "edge") {
            if (!n) fail("'edge' before 'nodes' header");
            long a = 0, b = 0;
            if (!(ss >> a >> b) || a < 1 || b < 1) fail("expected 'edge <i> <j>'");
            if (a > *n || b > *n) fail("edge endpoint out of range 1.." + std::to_string(*n));
            if (a == b) fail("self-loop on node " + std::to_string(a));
            Topology::Edge e{static_cast<NodeId>(a), static_cast<NodeId>(b), std::nullopt};
            std::string ptok;
            if (ss >> ptok) {
                double p = 0;
                if (ptok != "p" || !(ss >> p)) fail("expected optional 'p <prob>' after edge");
                if (!(p > 0.0 && p <= 1.0)) fail("edge probability must be in (0, 1]");
                e.success_prob = p;
            }
            edges.push_back(e);
        } else if (tok == "initiator") {
            long v = 0;
            if (!(ss >> v) || v < 1) fail("expected 'initiator <id>'");
            initiator = static_cast<NodeId>(v);
        } else {
            fail("unknown directive '" + tok + "'");
        }
        std::string extra;
        if (ss >> extra) fail("trailing token '" + extra + "'");
    }
    if (!n) {
        line_no = 0;
        fail("missing 'nodes <n>' header");
    }

    std::vector<NodeId> nodes(*n);
    for (unsigned i = 0; i < *n; ++i) nodes[i] = i + 1;
    try {
        return Topology::create(std::move(nodes), std::move(edges), initiator, global_success_prob);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(e.what());
    }
}

Topology load_topology_file(const std::string& path, double global_success_prob) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open topology file: " + path);
    return parse_topology(in, global_success_prob);
}

Topology random_geometric(unsigned n, double radius, std::uint64_t seed, double global_success_prob) {
    if (n == 0) throw std::invalid_argument("random_geometric: n must be >= 1");
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

    std::vector<std::pair<double, double>> pos(n);
    for (auto& p : pos) {
        p.first = unit();
        p.second = unit();
    }

    std::vector<NodeId> nodes(n);
    for (unsigned i = 0; i < n; ++i) nodes[i] = i + 1;
    std::vector<Topology::Edge> edges;
    double r2 = radius * radius;
    for (unsigned i = 0; i < n; ++i) {
        for (unsigned j = i + 1; j < n; ++j) {
            double dx = pos[i].first - pos[j].first;
            double dy = pos[i].second - pos[j].second;
            if (dx * dx + dy * dy <= r2) edges.push_back({nodes[i], nodes[j], std::nullopt});
        }
    }
    return Topology::create(std::move(nodes), std::move(edges), 1, global_success_prob);
}

namespace {
// Desk-scale stand-ins for the 26-node and 45-node testbeds; seeds picked
// so both graphs come out connected with a few-hop diameter.
constexpr std::uint64_t kFlockLab26Seed = 2628;
constexpr double kFlockLab26Radius = 0.30;
constexpr std::uint64_t kDCube45Seed = 4501;
constexpr double kDCube45Radius = 0.24;
}  // namespace

bool is_preset_name(const std::string& name) { return name == "flocklab26" || name == "dcube45"; }

Topology preset_topology(const std::string& name, double global_success_prob) {
    if (name == "flocklab26") return random_geometric(26, kFlockLab26Radius, kFlockLab26Seed, global_success_prob);
    if (name == "dcube45") return random_geometric(45, kDCube45Radius, kDCube45Seed, global_success_prob);
    throw std::invalid_argument("unknown topology preset: " + name);
}

}  // namespace ctagg::ctsim

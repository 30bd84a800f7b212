#include "bayeslab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bayeslab/errors.hpp"
#include "bayeslab/special.hpp"

namespace bayeslab {

namespace {

constexpr long long kEnumerationGuard = 1LL << 26;

void check_shape(int rows, int cols) {
    if (rows < 1 || cols < 1) throw parameter_error("lattice dimensions must be at least 1x1");
}

long long state_count_guarded(int rows, int cols, int G) {
    check_shape(rows, cols);
    if (G < 1) throw parameter_error("need at least one color");
    long long total = 1;
    for (int s = 0; s < rows * cols; ++s) {
        total *= G;
        if (total > kEnumerationGuard) {
            throw parameter_error("configuration space exceeds the 2^26 enumeration guard");
        }
    }
    return total;
}

// Neighbor offsets for the unordered-pair scan (each pair counted once, no
// wrap at the boundary).
int agreement_count(const Lattice& l) {
    int count = 0;
    for (int r = 0; r < l.rows; ++r) {
        for (int c = 0; c < l.cols; ++c) {
            int v = l.at(r, c);
            if (c + 1 < l.cols && l.at(r, c + 1) == v) ++count;
            if (r + 1 < l.rows && l.at(r + 1, c) == v) ++count;
            if (l.neighborhood == Neighborhood::eight && r + 1 < l.rows) {
                if (c + 1 < l.cols && l.at(r + 1, c + 1) == v) ++count;
                if (c - 1 >= 0 && l.at(r + 1, c - 1) == v) ++count;
            }
        }
    }
    return count;
}

void neighbor_label_counts(const Lattice& l, int r, int c, int G, std::vector<int>& n_g) {
    n_g.assign(static_cast<std::size_t>(G), 0);
    auto tally = [&](int rr, int cc) {
        if (rr < 0 || rr >= l.rows || cc < 0 || cc >= l.cols) return;
        ++n_g[static_cast<std::size_t>(l.at(rr, cc))];
    };
    tally(r - 1, c);
    tally(r + 1, c);
    tally(r, c - 1);
    tally(r, c + 1);
    if (l.neighborhood == Neighborhood::eight) {
        tally(r - 1, c - 1);
        tally(r - 1, c + 1);
        tally(r + 1, c - 1);
        tally(r + 1, c + 1);
    }
}

void update_site(Lattice& l, int r, int c, double beta, int G, RngState& rng,
                 std::vector<int>& n_g, std::vector<double>& probs) {
    neighbor_label_counts(l, r, c, G, n_g);
    double best = -std::numeric_limits<double>::infinity();
    probs.resize(static_cast<std::size_t>(G));
    for (int g = 0; g < G; ++g) {
        probs[static_cast<std::size_t>(g)] = beta * n_g[static_cast<std::size_t>(g)];
        best = std::max(best, probs[static_cast<std::size_t>(g)]);
    }
    double total = 0.0;
    for (double& p : probs) {
        p = std::exp(p - best);
        total += p;
    }
    double u = rng.next_double() * total;
    double acc = 0.0;
    int pick = G - 1;
    for (int g = 0; g < G; ++g) {
        acc += probs[static_cast<std::size_t>(g)];
        if (u < acc) {
            pick = g;
            break;
        }
    }
    l.at(r, c) = pick;
}

void config_from_rank(long long rank, int G, Lattice& out) {
    for (int s = 0; s < out.sites(); ++s) {
        out.labels[static_cast<std::size_t>(s)] = static_cast<int>(rank % G);
        rank /= G;
    }
}

bool is_unicolor(const Lattice& l) {
    for (int v : l.labels) {
        if (v != l.labels[0]) return false;
    }
    return true;
}

bool is_checkerboard(const Lattice& l) {
    int base = l.at(0, 0);
    for (int r = 0; r < l.rows; ++r) {
        for (int c = 0; c < l.cols; ++c) {
            int want = (r + c) % 2 == 0 ? base : 1 - base;
            if (l.at(r, c) != want) return false;
        }
    }
    return true;
}

}  // namespace

Lattice make_lattice(int rows, int cols, Neighborhood neighborhood, int fill) {
    check_shape(rows, cols);
    if (fill < 0) throw parameter_error("labels must be nonnegative");
    Lattice l;
    l.rows = rows;
    l.cols = cols;
    l.neighborhood = neighborhood;
    l.labels.assign(static_cast<std::size_t>(rows * cols), fill);
    return l;
}

Lattice random_lattice(int rows, int cols, int G, RngState& rng, Neighborhood neighborhood) {
    if (G < 1) throw parameter_error("need at least one color");
    Lattice l = make_lattice(rows, cols, neighborhood);
    for (int& v : l.labels) {
        v = std::min(G - 1, static_cast<int>(rng.next_double() * G));
    }
    return l;
}

int lattice_agreements(const Lattice& l) {
    check_shape(l.rows, l.cols);
    return agreement_count(l);
}

Lattice gibbs_sweep(Lattice l, double beta, int G, RngState& rng, SweepSchedule schedule) {
    check_shape(l.rows, l.cols);
    if (G < 1) throw parameter_error("need at least one color");
    for (int v : l.labels) {
        if (v < 0 || v >= G) throw parameter_error("lattice labels out of range for G");
    }

    std::vector<int> n_g;
    std::vector<double> probs;
    if (schedule == SweepSchedule::random_scan) {
        int S = l.sites();
        for (int step = 0; step < S; ++step) {
            int site = std::min(S - 1, static_cast<int>(rng.next_double() * S));
            update_site(l, site / l.cols, site % l.cols, beta, G, rng, n_g, probs);
        }
        return l;
    }

    if (l.neighborhood != Neighborhood::four) {
        throw parameter_error("two-color sweep needs the four-neighbor lattice");
    }
    for (int parity = 0; parity < 2; ++parity) {
        for (int r = 0; r < l.rows; ++r) {
            for (int c = 0; c < l.cols; ++c) {
                if ((r + c) % 2 == parity) update_site(l, r, c, beta, G, rng, n_g, probs);
            }
        }
    }
    return l;
}

double exact_partition_log(int rows, int cols, int G, double beta, Neighborhood neighborhood) {
    long long total = state_count_guarded(rows, cols, G);

    // Count configurations per agreement level; the log-sum over levels is
    // then immune to overflow no matter how large beta is.
    Lattice scratch = make_lattice(rows, cols, neighborhood);
    int max_pairs = 2 * rows * cols * (neighborhood == Neighborhood::eight ? 2 : 1);
    std::vector<double> level_counts(static_cast<std::size_t>(max_pairs + 1), 0.0);
    for (long long rank = 0; rank < total; ++rank) {
        config_from_rank(rank, G, scratch);
        level_counts[static_cast<std::size_t>(agreement_count(scratch))] += 1.0;
    }

    std::vector<double> log_terms;
    log_terms.reserve(level_counts.size());
    for (std::size_t level = 0; level < level_counts.size(); ++level) {
        if (level_counts[level] == 0.0) continue;
        log_terms.push_back(beta * static_cast<double>(level) + std::log(level_counts[level]));
    }
    return log_sum_exp(log_terms);
}

double exact_partition_reciprocal(int rows, int cols, int G, double beta,
                                  Neighborhood neighborhood) {
    return std::exp(-exact_partition_log(rows, cols, G, beta, neighborhood));
}

long long clique_count_eight(int rows, int cols) {
    check_shape(rows, cols);
    return static_cast<long long>(rows - 1) * static_cast<long long>(cols - 1);
}

double piecewise_linear_integral(const std::vector<double>& betas,
                                 const std::vector<double>& values, double a0, double a1) {
    if (betas.size() != values.size() || betas.size() < 2) {
        throw parameter_error("need matching knot and value sequences with at least two knots");
    }
    for (std::size_t i = 1; i < betas.size(); ++i) {
        if (!(betas[i] > betas[i - 1])) throw parameter_error("knots must be strictly ascending");
    }
    if (!(a0 < a1) || a0 < betas.front() || a1 > betas.back()) {
        throw parameter_error("need betas.front() <= a0 < a1 <= betas.back()");
    }

    auto interp = [&](std::size_t seg, double u) {
        double w = (u - betas[seg]) / (betas[seg + 1] - betas[seg]);
        return values[seg] + w * (values[seg + 1] - values[seg]);
    };

    double acc = 0.0;
    for (std::size_t seg = 0; seg + 1 < betas.size(); ++seg) {
        double lo = std::max(a0, betas[seg]);
        double hi = std::min(a1, betas[seg + 1]);
        if (lo >= hi) continue;
        acc += 0.5 * (hi - lo) * (interp(seg, lo) + interp(seg, hi));
    }
    return acc;
}

Lattice mpm_estimate(const FieldPosteriorSample& samples) {
    if (samples.states.empty()) throw parameter_error("need at least one posterior sample");
    if (samples.G < 1) throw parameter_error("need at least one color");
    const Lattice& first = samples.states.front();

    Lattice out = make_lattice(first.rows, first.cols, first.neighborhood);
    std::vector<int> counts;
    for (int s = 0; s < out.sites(); ++s) {
        counts.assign(static_cast<std::size_t>(samples.G), 0);
        for (const Lattice& state : samples.states) {
            if (state.rows != first.rows || state.cols != first.cols) {
                throw parameter_error("posterior samples must share one lattice shape");
            }
            ++counts[static_cast<std::size_t>(state.labels[static_cast<std::size_t>(s)])];
        }
        int best = 0;
        for (int g = 1; g < samples.G; ++g) {
            if (counts[static_cast<std::size_t>(g)] > counts[static_cast<std::size_t>(best)]) {
                best = g;
            }
        }
        out.labels[static_cast<std::size_t>(s)] = best;
    }
    return out;
}

Lattice map_estimate(const FieldPosteriorSample& samples, double beta) {
    if (samples.states.empty()) throw parameter_error("need at least one posterior sample");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.states.size(); ++i) {
        double score = beta * agreement_count(samples.states[i]);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return samples.states[best];
}

double l4_risk(const Matrix& pair_prob, const std::vector<int>& labels) {
    int n = static_cast<int>(pair_prob.rows());
    if (pair_prob.cols() != n || static_cast<int>(labels.size()) != n) {
        throw parameter_error("pair probability matrix and labeling sizes must match");
    }
    double risk = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double p = pair_prob(i, j);
            risk += labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]
                        ? 1.0 - p
                        : p;
        }
    }
    return risk;
}

L4Result l4_clustering(const Matrix& pair_prob, int G, RngState& rng, int starts) {
    int n = static_cast<int>(pair_prob.rows());
    if (pair_prob.cols() != n || n < 1) throw parameter_error("pair probabilities must be square");
    if (G < 1) throw parameter_error("need at least one cluster label");
    if (starts < 1) throw parameter_error("need at least one start");
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double p = pair_prob(i, j);
            if (!(p >= 0.0 && p <= 1.0) || std::abs(p - pair_prob(j, i)) > 1e-12) {
                throw parameter_error("pair probabilities must be symmetric and in [0, 1]");
            }
        }
    }

    L4Result best;
    best.risk = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
        std::vector<int> z(static_cast<std::size_t>(n));
        for (int& v : z) v = std::min(G - 1, static_cast<int>(rng.next_double() * G));

        for (int pass = 0; pass < 10000; ++pass) {
            bool changed = false;
            for (int i = 0; i < n; ++i) {
                int argmin = 0;
                double lowest = std::numeric_limits<double>::infinity();
                for (int a = 0; a < G; ++a) {
                    double cost = 0.0;
                    for (int j = 0; j < n; ++j) {
                        if (j == i) continue;
                        double p = pair_prob(i, j);
                        cost += z[static_cast<std::size_t>(j)] == a ? 1.0 - p : p;
                    }
                    if (cost < lowest) {
                        lowest = cost;
                        argmin = a;
                    }
                }
                if (argmin != z[static_cast<std::size_t>(i)]) {
                    z[static_cast<std::size_t>(i)] = argmin;
                    changed = true;
                }
            }
            if (!changed) break;
        }

        double risk = l4_risk(pair_prob, z);
        if (risk < best.risk) {
            best.risk = risk;
            best.labels = std::move(z);
        }
    }
    return best;
}

std::vector<double> beta_threshold_experiment(int rows, int cols, double precision,
                                              int sweeps, int reps, RngState& rng,
                                              ThresholdDirection direction) {
    check_shape(rows, cols);
    if (!(precision > 0.0)) throw parameter_error("need precision > 0");
    if (sweeps < 1 || reps < 1) throw parameter_error("need sweeps >= 1 and reps >= 1");

    double sign = direction == ThresholdDirection::unicolor ? 1.0 : -1.0;
    std::vector<double> thresholds;
    thresholds.reserve(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep) {
        Lattice l = random_lattice(rows, cols, 2, rng);
        bool found = false;
        for (int step = 1; step <= 100000; ++step) {
            double beta = sign * precision * step;
            for (int s = 0; s < sweeps; ++s) {
                l = gibbs_sweep(std::move(l), beta, 2, rng, SweepSchedule::random_scan);
            }
            bool done = direction == ThresholdDirection::unicolor ? is_unicolor(l)
                                                                  : is_checkerboard(l);
            if (done) {
                thresholds.push_back(beta);
                found = true;
                break;
            }
        }
        if (!found) throw numeric_guard_error("annealing never reached the target pattern");
    }
    return thresholds;
}

AbcResult abc_posterior(const AbcPriorSampler& prior, const AbcForwardSampler& model,
                        const AbcSummaryFn& stat, const std::vector<double>& observed,
                        double epsilon, const AbcDistanceFn& distance, int n_props,
                        RngState& rng) {
    if (!(epsilon >= 0.0)) throw parameter_error("need epsilon >= 0");
    if (n_props < 1) throw parameter_error("need at least one proposal");

    std::vector<double> observed_stat = stat(observed);
    AbcResult out;
    for (int i = 0; i < n_props; ++i) {
        double theta = prior(rng);
        std::vector<double> simulated = model(theta, rng);
        if (distance(stat(simulated), observed_stat) <= epsilon) {
            out.accepted.push_back(theta);
        }
    }
    out.acceptance_rate =
        static_cast<double>(out.accepted.size()) / static_cast<double>(n_props);
    if (out.accepted.empty()) {
        throw numeric_guard_error(
            "ABC accepted nothing over the proposal budget; shrink epsilon less or raise n_props",
            out.acceptance_rate);
    }
    return out;
}

std::vector<double> hc_joint_reconstruction(const SiteConditional& conditional,
                                            const Lattice& reference, int G) {
    long long total = state_count_guarded(reference.rows, reference.cols, G);
    for (int v : reference.labels) {
        if (v < 0 || v >= G) throw parameter_error("reference labels out of range for G");
    }

    int S = reference.sites();
    Lattice target = reference;
    Lattice mix = reference;
    std::vector<double> log_ratio(static_cast<std::size_t>(total));
    for (long long rank = 0; rank < total; ++rank) {
        config_from_rank(rank, G, target);
        std::copy(reference.labels.begin(), reference.labels.end(), mix.labels.begin());

        // Telescoping product: site s is conditioned on sites < s already at
        // the target labels and sites > s still at the reference labels.
        double lr = 0.0;
        for (int s = 0; s < S; ++s) {
            double num = conditional(mix, s, target.labels[static_cast<std::size_t>(s)]);
            double den = conditional(mix, s, reference.labels[static_cast<std::size_t>(s)]);
            if (!(num > 0.0) || !(den > 0.0)) {
                throw numeric_guard_error(
                    "conditionals vanish on the product support; no positive joint exists");
            }
            lr += std::log(num) - std::log(den);
            mix.labels[static_cast<std::size_t>(s)] = target.labels[static_cast<std::size_t>(s)];
        }
        log_ratio[static_cast<std::size_t>(rank)] = lr;
    }

    double lse = log_sum_exp(log_ratio);
    std::vector<double> table(log_ratio.size());
    for (std::size_t i = 0; i < log_ratio.size(); ++i) {
        table[i] = std::exp(log_ratio[i] - lse);
    }
    return table;
}

std::string lattice_to_text(const Lattice& l) {
    std::ostringstream out;
    for (int r = 0; r < l.rows; ++r) {
        for (int c = 0; c < l.cols; ++c) {
            if (c > 0) out << ' ';
            out << l.at(r, c);
        }
        out << '\n';
    }
    return out.str();
}

Lattice lattice_from_text(const std::string& text, Neighborhood neighborhood) {
    std::istringstream in(text);
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::vector<int> row;
        int v = 0;
        while (fields >> v) {
            if (v < 0) throw parameter_error("labels must be nonnegative");
            row.push_back(v);
        }
        if (!fields.eof()) throw parameter_error("malformed lattice row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parameter_error("empty lattice text");
    for (const auto& row : rows) {
        if (row.size() != rows[0].size() || row.empty()) {
            throw parameter_error("lattice rows must be nonempty and rectangular");
        }
    }

    Lattice l = make_lattice(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()),
                             neighborhood);
    for (int r = 0; r < l.rows; ++r) {
        for (int c = 0; c < l.cols; ++c) {
            l.at(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    return l;
}

}  // namespace bayeslab

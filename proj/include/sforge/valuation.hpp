#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sforge/parameter_space.hpp"

namespace sforge {

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace valuation_detail {

inline double default_of_domain(const Domain& d) {
    if (const auto* iv = std::get_if<Interval>(&d)) return iv->midpoint();
    std::vector<double> set = std::get<std::vector<double>>(d);
    std::sort(set.begin(), set.end());
    return set[(set.size() - 1) / 2];  // lower of two middles
}

// Residual of a check rule as a function of one parameter, holding every
// other value fixed. Positive means satisfied (strict rules need > 0).
inline double residual_at(const ConstraintRule& rule, const std::string& path, double x, ValueMap values) {
    values[path] = x;
    ConcreteValuation v;
    v.values = std::move(values);
    return evaluate_rule(rule, v).residual;
}

inline bool satisfied_residual(const ConstraintRule& rule, double r) {
    if (rule.cmp == Cmp::gt || rule.cmp == Cmp::lt) return r > 0.0;
    if (rule.cmp == Cmp::eq) return r >= -1e-9;
    return r >= 0.0;
}

// Intersects `box` with the satisfied set of `rule` along parameter `path`,
// assuming the residual is monotone over the box (true for the generated
// catalog: every parameter occurs once per rule side).
inline bool narrow_to_satisfied(const ConstraintRule& rule, const std::string& path, const ValueMap& values,
                                Interval& box) {
    const double r_lo = residual_at(rule, path, box.lo, values);
    const double r_hi = residual_at(rule, path, box.hi, values);
    const bool ok_lo = satisfied_residual(rule, r_lo);
    const bool ok_hi = satisfied_residual(rule, r_hi);
    if (ok_lo && ok_hi) return true;
    if (!ok_lo && !ok_hi) return false;
    double good = ok_lo ? box.lo : box.hi;
    double bad = ok_lo ? box.hi : box.lo;
    for (int i = 0; i < 80; ++i) {
        const double mid = (good + bad) / 2.0;
        if (satisfied_residual(rule, residual_at(rule, path, mid, values))) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    box = ok_lo ? Interval{box.lo, good} : Interval{good, box.hi};
    return true;
}

}  // namespace valuation_detail

// Deterministic, seed-free default valuation: free parameters start at the
// midpoint of their interval (median of a finite set) and are shifted the
// minimal amount, in topological order, until every check rule holds; derived
// parameters are recomputed from their define rules. A crest or sag whose
// curve does not fit the section gets its tilts scaled down.
inline ConcreteValuation assign_defaults(const ParameterSpace& ps) {
    using namespace valuation_detail;

    const std::vector<ParamRef> order = topological_order(ps);
    std::map<std::string, size_t> order_index;
    for (size_t i = 0; i < order.size(); ++i) order_index[order[i].path()] = i;

    // Group check rules by the scope parameter that settles last.
    std::map<size_t, std::vector<const ConstraintRule*>> rules_by_last;
    for (const auto& rule : ps.rules) {
        if (rule.role != RuleRole::check) continue;
        size_t last = 0;
        bool resolvable = true;
        for (const auto& ref : rule.scope()) {
            auto it = order_index.find(ref.path());
            if (it == order_index.end()) {
                resolvable = false;
                break;
            }
            last = std::max(last, it->second);
        }
        if (resolvable) rules_by_last[last].push_back(&rule);
    }

    ConcreteValuation v;
    v.provenance = ConcreteValuation::Provenance::defaults;

    auto recompute_define = [&](const Parameter& p, const ParamRef& ref) {
        const ConstraintRule* rule = ps.find_rule(p.define_rule_id);
        if (rule == nullptr) throw InfeasibleError("derived parameter without define rule: " + ref.path());
        v.values[ref.path()] = eval_expr(rule->rhs, v.values);
    };

    // Scales the free inputs under the abs(...) of a define rule so that the
    // target reaches `target_value`; the crest/sag tangent length is linear
    // in its tilts, which makes the scaling exact.
    auto scale_define_inputs = [&](const ConstraintRule& define, double target_value) -> bool {
        const double current = eval_expr(define.rhs, v.values);
        if (current == 0.0) return false;
        const double factor = target_value / current;
        if (!(factor > 0.0) || factor >= 1.0) return false;
        std::vector<ParamRef> scaled;
        std::function<void(const Expr&, bool)> walk = [&](const Expr& e, bool inside_abs) {
            if (e.op == Expr::Op::param && inside_abs) {
                const Parameter* p = ps.find_parameter(e.ref);
                if (p != nullptr && !p->derived) scaled.push_back(e.ref);
                return;
            }
            if (e.a) walk(*e.a, inside_abs || e.op == Expr::Op::abs);
            if (e.b) walk(*e.b, inside_abs || e.op == Expr::Op::abs);
        };
        walk(define.rhs, false);
        if (scaled.empty()) return false;
        ValueMap backup = v.values;
        for (const auto& ref : scaled) {
            const Parameter* p = ps.find_parameter(ref);
            const Interval hull = domain_hull(p->domain);
            v.values[ref.path()] = hull.clamp(v.values[ref.path()] * factor);
        }
        const double reached = eval_expr(define.rhs, v.values);
        if (std::abs(reached - target_value) > 1e-6 * std::max(1.0, std::abs(target_value))) {
            v.values = std::move(backup);
            return false;
        }
        v.values[define.define_target().path()] = reached;
        return true;
    };

    for (int pass = 0; pass < 8; ++pass) {
        for (size_t i = 0; i < order.size(); ++i) {
            const ParamRef& ref = order[i];
            const Parameter* p = ps.find_parameter(ref);
            if (p->derived) {
                recompute_define(*p, ref);
            } else if (!v.values.count(ref.path())) {
                v.values[ref.path()] = default_of_domain(p->domain);
            }

            auto rules_it = rules_by_last.find(i);
            if (rules_it == rules_by_last.end()) continue;
            bool any_violated = false;
            for (const ConstraintRule* rule : rules_it->second) {
                if (evaluate_rule(*rule, v).kind == RuleOutcome::Kind::violated) any_violated = true;
            }
            if (!any_violated) continue;

            if (!p->derived) {
                Interval feasible = domain_hull(p->domain);
                for (const ConstraintRule* rule : rules_it->second) {
                    if (narrow_to_satisfied(*rule, ref.path(), v.values, feasible)) continue;
                    // No value of the last parameter works: shift an earlier
                    // free parameter of the rule the minimal amount that
                    // reopens the interval.
                    bool assisted = false;
                    for (const auto& other : rule->scope()) {
                        if (other == ref) continue;
                        const Parameter* q = ps.find_parameter(other);
                        if (q == nullptr || q->derived) continue;
                        const Interval own = domain_hull(p->domain);
                        const double r_lo = residual_at(*rule, ref.path(), own.lo, v.values);
                        const double r_hi = residual_at(*rule, ref.path(), own.hi, v.values);
                        ValueMap pinned = v.values;
                        pinned[ref.path()] = r_lo > r_hi ? own.lo : own.hi;
                        Interval qbox = domain_hull(q->domain);
                        if (!narrow_to_satisfied(*rule, other.path(), pinned, qbox)) continue;
                        double shifted = qbox.clamp(v.values[other.path()]);
                        if (shifted != v.values[other.path()]) {
                            const double nudge = 1e-9 * std::max(1.0, std::abs(shifted));
                            shifted = qbox.clamp(shifted + (shifted == qbox.lo ? nudge : -nudge));
                        }
                        v.values[other.path()] = shifted;
                        feasible = domain_hull(p->domain);
                        if (narrow_to_satisfied(*rule, ref.path(), v.values, feasible)) {
                            assisted = true;
                            break;
                        }
                    }
                    if (!assisted) {
                        throw InfeasibleError("infeasible rule system at rule '" + rule->id +
                                              "': no value of " + ref.path() + " satisfies it");
                    }
                }
                v.values[ref.path()] = feasible.clamp(v.values[ref.path()]);
            } else {
                // The settling parameter is derived: solve the rule for the
                // derived value, then push the change into the define inputs.
                const ConstraintRule* define = ps.find_rule(p->define_rule_id);
                for (const ConstraintRule* rule : rules_it->second) {
                    if (evaluate_rule(*rule, v).kind != RuleOutcome::Kind::violated) continue;
                    Interval target_box = domain_hull(p->domain);
                    if (!narrow_to_satisfied(*rule, ref.path(), v.values, target_box)) {
                        throw InfeasibleError("infeasible rule system at rule '" + rule->id + "'");
                    }
                    const double current = v.values[ref.path()];
                    double target_value = target_box.clamp(current);
                    if (target_value != current) {
                        // Land strictly inside the feasible side; the scaled
                        // inputs reproduce the target only up to rounding.
                        const double nudge = 1e-9 * std::max(1.0, std::abs(target_value));
                        target_value += current > target_box.hi ? -nudge : nudge;
                    }
                    if (!scale_define_inputs(*define, target_value)) {
                        throw InfeasibleError("infeasible rule system at rule '" + rule->id +
                                              "': cannot adjust derived " + ref.path());
                    }
                }
            }
        }

        // Derived outputs must also sit inside their own domains; repair
        // single-input defines by shifting the input minimally.
        bool dirty = false;
        for (size_t i = 0; i < order.size(); ++i) {
            const ParamRef& ref = order[i];
            const Parameter* p = ps.find_parameter(ref);
            if (!p->derived) continue;
            const double value = v.values[ref.path()];
            if (domain_contains(p->domain, value)) continue;
            const ConstraintRule* define = ps.find_rule(p->define_rule_id);
            std::vector<ParamRef> inputs;
            collect_refs(define->rhs, inputs);
            const Interval hull = domain_hull(p->domain);
            double target = hull.clamp(value);
            const double nudge = 1e-9 * std::max(1.0, std::abs(target));
            target += value > hull.hi ? -nudge : nudge;
            if (inputs.size() == 1) {
                const Parameter* in = ps.find_parameter(inputs[0]);
                Interval box = domain_hull(in->domain);
                // Bisect the input so that the define output hits `target`.
                auto output_at = [&](double x) {
                    ValueMap trial = v.values;
                    trial[inputs[0].path()] = x;
                    return eval_expr(define->rhs, trial);
                };
                const double at_lo = output_at(box.lo), at_hi = output_at(box.hi);
                if ((at_lo - target) * (at_hi - target) > 0.0) {
                    throw InfeasibleError("infeasible rule system at rule '" + define->id +
                                          "': derived " + ref.path() + " cannot reach its range");
                }
                double lo = box.lo, hi = box.hi;
                for (int it = 0; it < 80; ++it) {
                    const double mid = (lo + hi) / 2.0;
                    if ((output_at(mid) - target) * (at_lo - target) <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                v.values[inputs[0].path()] = hi;
                v.values[ref.path()] = output_at(hi);
                dirty = true;
            } else if (!scale_define_inputs(*define, target)) {
                throw InfeasibleError("infeasible rule system at rule '" + define->id + "': derived " +
                                      ref.path() + " outside its range");
            }
        }

        if (!dirty && check_valuation(ps, v).empty()) return v;
    }

    const auto violations = check_valuation(ps, v);
    if (!violations.empty()) {
        throw InfeasibleError("infeasible rule system: first unresolved is '" + violations.front().subject +
                              "' (" + violations.front().message + ")");
    }
    return v;
}

namespace valuation_detail {

// Platform-stable uniform draw on [0, 1).
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace valuation_detail

// Rule-respecting rejection sampler: uniform draws over every free domain,
// derived parameters recomputed, candidates failing check_valuation redrawn
// up to 1000 times per valuation. Valuation i draws from seed + i, so the
// output is deterministic in (seed, n) and parallelizable across indices.
inline std::vector<ConcreteValuation> sample_concrete(const ParameterSpace& ps, std::uint64_t seed,
                                                      std::size_t n) {
    using valuation_detail::uniform01;
    constexpr int kRetryCap = 1000;

    const std::vector<ParamRef> order = topological_order(ps);
    std::vector<ConcreteValuation> out;
    out.reserve(n);
    std::uint64_t attempts_total = 0;

    for (std::size_t i = 0; i < n; ++i) {
        std::mt19937_64 rng(seed + i);
        bool accepted = false;
        for (int attempt = 0; attempt < kRetryCap && !accepted; ++attempt) {
            ++attempts_total;
            ConcreteValuation v;
            v.provenance = ConcreteValuation::Provenance::sampled;
            v.seed = seed + i;
            bool eval_ok = true;
            for (const auto& ref : order) {
                const Parameter* p = ps.find_parameter(ref);
                if (p->derived) {
                    const ConstraintRule* rule = ps.find_rule(p->define_rule_id);
                    try {
                        v.values[ref.path()] = eval_expr(rule->rhs, v.values);
                    } catch (const EvalError&) {
                        eval_ok = false;
                        break;
                    }
                } else if (const auto* iv = std::get_if<Interval>(&p->domain)) {
                    v.values[ref.path()] = iv->lo + uniform01(rng) * iv->width();
                } else {
                    const auto& set = std::get<std::vector<double>>(p->domain);
                    v.values[ref.path()] = set[static_cast<size_t>(rng() % set.size())];
                }
            }
            if (eval_ok && check_valuation(ps, v).empty()) {
                out.push_back(std::move(v));
                accepted = true;
            }
        }
        if (!accepted) {
            const double rate = attempts_total == 0 ? 0.0
                                                    : static_cast<double>(out.size()) /
                                                          static_cast<double>(attempts_total);
            throw SamplingError("retry cap exceeded after " + std::to_string(attempts_total) +
                                " draws; acceptance rate " + format_number(rate));
        }
    }
    return out;
}

}  // namespace sforge

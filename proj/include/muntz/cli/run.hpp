#pragma once

// Stage orchestration for muntzlab: runs the configured commands in order,
// writes the CSV/JSON products and a report with named assertions.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 failed assertion
// or internal inconsistency, 3 precision exhausted.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "muntz/biorth.hpp"
#include "muntz/cli/config.hpp"
#include "muntz/errors.hpp"
#include "muntz/expand.hpp"
#include "muntz/hereditary.hpp"
#include "muntz/operators.hpp"
#include "muntz/sampling.hpp"
#include "muntz/spaces.hpp"

namespace muntz::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitPrecision = 3;

inline constexpr int kCsvDigits = 40;

struct RunOptions
{
    std::optional<long> precision_override;
    std::optional<std::string> output_dir;
};

struct RunOutcome
{
    int exit_code = kExitOk;
    Json report;
    std::filesystem::path output_dir;
};

namespace detail {

inline std::string num(const Scalar& x) { return x.to_string(kCsvDigits); }

inline Json complex_json(const Complex& z) { return Json::array({num(z.re), num(z.im)}); }

class Pipeline
{
  public:
    Pipeline(RunConfig cfg, std::filesystem::path out)
        : cfg_(std::move(cfg))
        , out_(std::move(out))
    {
    }

    int run(Json& report)
    {
        std::filesystem::create_directories(out_);
        report["config"] = cfg_.source;
        report["precision_bits"] = cfg_.precision.mantissa_bits;
        report["escalation_limit"] = cfg_.precision.escalation_limit;
        report["output_files"] = Json::array();
        int code = kExitOk;
        Json wall = Json::object();
        std::string failed_stage;
        try {
            for (const auto& stage : cfg_.commands) {
                failed_stage = stage;
                const auto start = std::chrono::steady_clock::now();
                stages_[stage] = run_stage(stage);
                wall[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }
            failed_stage.clear();
        } catch (const PrecisionExhausted& e) {
            code = kExitPrecision;
            record_error("precision_exhausted", e.what());
        } catch (const QuadratureFailure& e) {
            code = kExitPrecision;
            record_error("quadrature_failure", e.what());
        } catch (const InternalConsistencyError& e) {
            code = kExitAssertion;
            record_error("internal_consistency", e.what());
        } catch (const NotPositiveDefinite& e) {
            code = kExitAssertion;
            record_error("not_positive_definite", e.what());
        } catch (const Error& e) {
            code = kExitUsage;
            record_error("usage", e.what());
        }

        bool assertions_ok = true;
        for (const auto& a : assertions_)
            assertions_ok = assertions_ok && a["passed"].get<bool>();
        if (code == kExitOk && !assertions_ok)
            code = kExitAssertion;

        report["stages"] = stages_;
        report["assertions"] = assertions_;
        report["escalations"] = escalations_json();
        if (!error_.is_null()) {
            error_["stage"] = failed_stage;
            report["error"] = error_;
        }
        report["failed"] = code != kExitOk;
        report["status"] = code == kExitOk ? "ok" : "failed";
        report["exit_code"] = code;
        report["output_files"] = files_;
        report["wall_times_seconds"] = wall;
        return code;
    }

  private:
    Json run_stage(const std::string& stage)
    {
        if (stage == "gram")
            return stage_gram();
        if (stage == "biorth")
            return stage_biorth();
        if (stage == "bound-fit")
            return stage_bound_fit();
        if (stage == "expand")
            return stage_expand();
        if (stage == "hereditary")
            return stage_hereditary();
        return stage_operator();
    }

    void record_error(const std::string& kind, const std::string& message)
    {
        error_ = Json::object();
        error_["kind"] = kind;
        error_["message"] = message;
    }

    void check(const std::string& name, bool passed, const Scalar& value, const Scalar& threshold,
               const std::string& relation)
    {
        Json a;
        a["name"] = name;
        a["passed"] = passed;
        a["value"] = num(value);
        a["relation"] = relation;
        a["threshold"] = num(threshold);
        assertions_.push_back(std::move(a));
    }

    void write_file(const std::string& name, const std::string& text)
    {
        std::ofstream f(out_ / name, std::ios::binary);
        f << text;
        if (!f)
            throw UsageError("cannot write " + (out_ / name).string());
        files_.push_back(name);
    }

    const SpacePtr& space()
    {
        if (!space_) {
            PrecisionScope scope(cfg_.precision.mantissa_bits);
            space_ = build_space(validate_exponents(cfg_.exponents.values), Interval(cfg_.a, cfg_.b), cfg_.precision);
            for (long b : space_->escalations)
                escalations_.push_back({"gram", b});
        }
        return space_;
    }

    const std::shared_ptr<const BiorthogonalSystem>& bio()
    {
        if (!bio_)
            bio_ = std::make_shared<BiorthogonalSystem>(compute_biorthogonal(space()));
        return bio_;
    }

    Json escalations_json() const
    {
        Json out = Json::array();
        for (const auto& [what, b] : escalations_) {
            Json e;
            e["stage"] = what;
            e["failed_at_bits"] = b;
            out.push_back(std::move(e));
        }
        return out;
    }

    Json stage_gram()
    {
        const TruncatedSpace& s = *space();
        PrecisionScope scope(s.bits);
        Json j;
        j["bits"] = s.bits;
        j["dimension"] = s.size();
        j["exponents"] = s.exponents.source;
        j["interval"] = Json::array({s.interval.a_text(), s.interval.b_text()});
        j["gap"] = s.size() > 1 ? num(s.exponents.gap) : "inf";
        j["inverse_exponent_sum"] = num(s.exponents.muntz_partial_sum);
        j["gram_max_abs"] = num(s.gram.max_abs());
        j["normalized_gram_min_eigenvalue"] = num(symmetric_eigenvalues(s.normalized_gram().to_dense()).front());
        const Scalar res = reconstruction_residual(s.gram_factor, s.gram);
        const Scalar bound = solver_residual_bound(s.size(), s.bits, s.gram.max_abs());
        j["factor_residual"] = num(res);
        check("gram_factorization", res <= bound, res, bound, "<=");
        return j;
    }

    Json stage_biorth()
    {
        const BiorthogonalSystem& b = *bio();
        const TruncatedSpace& s = *b.space;
        PrecisionScope scope(s.bits);
        std::string csv = "n,lambda,D_n,r_norm\n";
        Scalar identity;
        for (std::size_t n = 0; n < b.size(); ++n) {
            csv += std::to_string(n + 1) + "," + s.exponents.source[n] + "," + num(b.distances[n]) + "," +
                   num(b.r_norms[n]) + "\n";
            identity = max(identity, abs(b.r_norms[n] * b.distances[n] - Scalar(1)));
        }
        write_file("distances.csv", csv);
        Json j;
        j["bits"] = s.bits;
        j["biorthogonality_residual"] = num(b.residual);
        j["residual_bound"] = num(b.residual_bound);
        check("biorthogonality", b.within_bound(), b.residual, b.residual_bound, "<=");
        check("distance_norm_identity", identity <= pow2(-s.bits + 2), identity, pow2(-s.bits + 2), "<=");
        if (b.size() >= 2) {
            // ||r_n^(N) - r_n^(N-1)||, reported only
            std::vector<std::string> head(s.exponents.source.begin(), s.exponents.source.end() - 1);
            const auto smaller = compute_biorthogonal(
                build_space(validate_exponents(head), s.interval, PrecisionConfig{s.bits, s.bits}));
            Json diffs = Json::array();
            for (const auto& d : truncation_differences(smaller, b))
                diffs.push_back(num(d));
            j["truncation_differences"] = diffs;
        }
        return j;
    }

    RealVector epsilons()
    {
        const TruncatedSpace& s = *space();
        PrecisionScope scope(s.bits);
        if (cfg_.epsilons.empty())
            return default_epsilons(s);
        RealVector out;
        for (const auto& e : cfg_.epsilons)
            out.push_back(Scalar::parse(e));
        return out;
    }

    Json stage_bound_fit()
    {
        const BiorthogonalSystem& b = *bio();
        const TruncatedSpace& s = *b.space;
        PrecisionScope scope(s.bits);
        const RealVector eps = epsilons();
        const auto dist = fit_distance_bound(b, eps);
        const auto norms = fit_norm_bound(b, eps);
        std::string csv = "fit,epsilon,log_constant,constant,slope,n,margin\n";
        auto emit = [&](const std::string& kind, const std::vector<BoundFit>& fits) {
            for (const auto& f : fits)
                for (std::size_t n = 0; n < f.margins.size(); ++n)
                    csv += kind + "," + num(f.epsilon) + "," + num(f.log_constant) + "," + num(f.constant) + "," +
                           num(f.slope) + "," + std::to_string(n + 1) + "," + num(f.margins[n]) + "\n";
        };
        emit("distance", dist);
        emit("norm", norms);
        write_file("bounds.csv", csv);

        Scalar worst; // max_n ln D_n - ln ||e_n||, expected <= 0
        for (std::size_t n = 0; n < b.size(); ++n) {
            const Scalar excess = log(b.distances[n]) - log(s.norms[n]);
            worst = n == 0 ? excess : max(worst, excess);
        }
        check("distance_below_norm", worst <= Scalar(0), worst, Scalar(0), "<=");
        const Scalar mirror = abs(dist.front().slope + norms.front().slope);
        const Scalar tol = half_precision_tolerance(s.bits);
        check("mirror_slope", mirror <= tol * abs(dist.front().slope), mirror, tol * abs(dist.front().slope), "<=");
        Json j;
        j["bits"] = s.bits;
        j["distance_slope"] = num(dist.front().slope);
        j["norm_slope"] = num(norms.front().slope);
        Json fits = Json::array();
        for (std::size_t i = 0; i < dist.size(); ++i) {
            Json f;
            f["epsilon"] = num(dist[i].epsilon);
            f["m_epsilon"] = num(dist[i].constant);
            f["M_epsilon"] = num(norms[i].constant);
            fits.push_back(std::move(f));
        }
        j["fits"] = fits;
        return j;
    }

    Json stage_expand()
    {
        const BiorthogonalSystem& b = *bio();
        const TruncatedSpace& s = *b.space;
        PrecisionScope scope(s.bits);
        std::string csv = "function,n,re,im\n";
        Json funcs = Json::array();
        for (const auto& name : cfg_.functions) {
            const auto fn = ExternalFunction::parse(name);
            const auto r = analyze(fn, b, cfg_.precision);
            for (std::size_t n = 0; n < r.coeffs.size(); ++n)
                csv += fn.name() + "," + std::to_string(n + 1) + "," + num(r.coeffs[n].re) + "," +
                       num(r.coeffs[n].im) + "\n";
            Json f;
            f["function"] = fn.name();
            f["residual_norm"] = num(r.residual_norm);
            funcs.push_back(std::move(f));
        }
        write_file("expansions.csv", csv);

        Rng rng(cfg_.seed);
        Scalar coeff_err, resid_err;
        for (std::size_t t = 0; t < cfg_.samples; ++t) {
            const SpanElement f = random_span_element(rng, s.size());
            const auto r = analyze(f, b);
            const Scalar scale = max_abs(f.coeffs);
            for (std::size_t n = 0; n < s.size(); ++n)
                coeff_err = max(coeff_err, abs(r.coeffs[n] - f.coeffs[n]) / scale);
            resid_err = max(resid_err, r.residual_norm / norm(f, s));
        }
        const Scalar tol = pow2(-s.bits / 4);
        check("expansion_round_trip_coefficients", coeff_err <= tol, coeff_err, tol, "<=");
        check("expansion_round_trip_residual", resid_err <= tol, resid_err, tol, "<=");
        Json j;
        j["bits"] = s.bits;
        j["functions"] = funcs;
        j["round_trip_samples"] = cfg_.samples;
        j["round_trip_max_relative_coefficient_error"] = num(coeff_err);
        j["round_trip_max_relative_residual"] = num(resid_err);
        return j;
    }

    Json stage_hereditary()
    {
        const BiorthogonalSystem& b = *bio();
        PrecisionScope scope(b.space->bits);
        const SweepMode mode = cfg_.exhaustive_partitions
                                   ? SweepMode::exhaustive()
                                   : SweepMode::random_sample(cfg_.partition_sample, cfg_.partition_seed);
        const auto sweep = sweep_partitions(b, mode);
        std::string csv = "bitmask,sigma_min,complete\n";
        for (const auto& r : sweep.reports)
            csv += std::to_string(r.partition.mask()) + "," + num(r.sigma_min) + "," +
                   (r.complete ? "true" : "false") + "\n";
        write_file("partitions.csv", csv);
        std::size_t complete = 0;
        for (const auto& r : sweep.reports)
            complete += r.complete ? 1 : 0;
        Json j;
        j["bits"] = b.space->bits;
        j["mode"] = cfg_.exhaustive_partitions ? "exhaustive" : "sample";
        j["partitions"] = sweep.reports.size();
        j["complete"] = complete;
        j["undecided"] = sweep.undecided;
        j["min_sigma"] = num(sweep.min_sigma);
        j["median_sigma"] = num(sweep.median_sigma);
        j["argmin_bitmask"] = sweep.argmin_mask;
        check("hereditary_completeness", sweep.all_complete && sweep.undecided == 0,
              Scalar(static_cast<long>(complete)), Scalar(static_cast<long>(sweep.reports.size())), "==");
        return j;
    }

    DiagonalOperator make_op(const std::shared_ptr<const BiorthogonalSystem>& b)
    {
        PrecisionScope scope(b->space->bits);
        WeightSpec spec;
        if (!cfg_.shift_weights) {
            ComplexVector u;
            for (const auto& [re, im] : cfg_.weights)
                u.emplace_back(Scalar::parse(re), Scalar::parse(im));
            spec = WeightSpec::custom_weights(std::move(u));
        }
        return make_operator(b, make_weights(Scalar::parse(cfg_.delta), b->space->exponents, spec));
    }

    // Krylov check with precision doubling while the rank is undecided.
    KrylovReport krylov_with_escalation(const DiagonalOperator& op, const SpanElement& f)
    {
        try {
            return krylov_synthesis_check(op, f);
        } catch (const RankUndecided&) {
        }
        long b = op.space().bits;
        while (b < cfg_.precision.escalation_limit) {
            escalations_.push_back({"operator.synthesis", b});
            b = std::min(2 * b, cfg_.precision.escalation_limit);
            auto bigger = std::make_shared<BiorthogonalSystem>(compute_biorthogonal(rebuild_at(op.space(), b)));
            const DiagonalOperator big = make_op(bigger);
            try {
                return krylov_synthesis_check(big, f);
            } catch (const RankUndecided&) {
            }
        }
        throw PrecisionExhausted(cfg_.precision.escalation_limit, "Krylov rank decision");
    }

    Json stage_operator()
    {
        const auto& b = bio();
        const TruncatedSpace& s = *b->space;
        PrecisionScope scope(s.bits);
        const DiagonalOperator op = make_op(b);
        const std::size_t n = op.size();
        const Scalar half = half_precision_tolerance(s.bits);

        Json j;
        j["bits"] = s.bits;
        j["delta"] = cfg_.delta;
        j["weights_kind"] = op.weights.shift ? "shift" : "custom";
        Json w = Json::array();
        for (const auto& u : op.weights.u)
            w.push_back(complex_json(u));
        j["weights"] = w;

        const EigenReport eig = verify_eigensystem(op);
        const Scalar t_res = max_abs(eig.t_residuals);
        const Scalar ts_res = max_abs(eig.t_star_residuals);
        Json e;
        e["T_residual_max"] = num(t_res);
        e["T_star_residual_max"] = num(ts_res);
        e["recovered_adjoint_eigenvalue_error"] = num(eig.recovered_eigenvalue_error);
        e["kernel_trivial"] = eig.kernel_trivial;
        e["simple"] = eig.simple;
        Json spec = Json::array();
        for (const auto& p : eig.spectrum) {
            Json q;
            q["value"] = complex_json(p.value);
            q["eigenvalue"] = p.eigenvalue;
            q["note"] = p.note;
            spec.push_back(std::move(q));
        }
        e["spectrum"] = spec;
        j["eigensystem"] = e;
        check("eigen_T_exact", t_res.is_zero(), t_res, Scalar(0), "==");
        check("eigen_T_star", ts_res <= half, ts_res, half, "<=");
        check("adjoint_eigenvalues_recovered", eig.recovered_eigenvalue_error <= half,
              eig.recovered_eigenvalue_error, half, "<=");
        check("kernel_trivial_and_simple", eig.kernel_trivial && eig.simple, Scalar(eig.kernel_trivial && eig.simple ? 1 : 0),
              Scalar(1), "==");

        Rng rng(cfg_.seed);
        Scalar adj;
        for (std::size_t t = 0; t < cfg_.samples; ++t) {
            const SpanElement h = random_span_element(rng, n);
            const SpanElement f = random_span_element(rng, n);
            adj = max(adj, adjoint_consistency(op, h, f));
        }
        j["adjoint"] = {{"samples", cfg_.samples}, {"max_residual", num(adj)}};
        check("adjoint_identity", adj <= half, adj, half, "<=");

        if (n >= 2) {
            const Scalar comm = commutator_norm(op);
            const Scalar control = commutator_norm(diagonal_gram(s.gram), op.weights.u);
            j["commutator_norm"] = num(comm);
            j["diagonal_gram_commutator_norm"] = num(control);
            const Scalar floor = Scalar(1000) * pow2(-s.bits);
            check("non_normal", comm > floor, comm, floor, ">");
            check("diagonal_gram_control", control <= half, control, half, "<=");
        }

        const Scalar eps = tail_epsilon(op);
        Json tails = Json::array();
        bool dominated = true, monotone = true;
        Scalar worst_ratio, previous;
        std::optional<std::size_t> first_increase;
        for (std::size_t m = 0; m <= n; ++m) {
            const TailNorm t = tail_norm(op, m, eps);
            Json row;
            row["m"] = m;
            row["computed"] = num(t.computed);
            row["analytic_bound"] = num(t.analytic_bound);
            const Scalar ratio = t.analytic_bound.is_zero() ? Scalar() : t.computed / t.analytic_bound;
            row["ratio"] = num(ratio);
            tails.push_back(std::move(row));
            dominated = dominated && t.computed <= t.analytic_bound;
            worst_ratio = max(worst_ratio, ratio);
            if (m > 0 && t.computed > previous && monotone) {
                monotone = false;
                first_increase = m;
            }
            previous = t.computed;
        }
        j["tail_epsilon"] = num(eps);
        j["tail_norms"] = tails;
        j["tail_monotone"] = monotone;
        if (first_increase)
            j["tail_first_increase_at_m"] = *first_increase;
        check("tail_domination", dominated, worst_ratio, Scalar(1), "<=");

        if (op.weights.shift) {
            Scalar worst;
            for (std::size_t t = 0; t < cfg_.samples; ++t) {
                const SpanElement f = random_span_element(rng, n);
                const ComplexVector z =
                    sample_points(rng, cfg_.samples, s.interval.a() - Scalar(1), s.interval.b());
                worst = max(worst, shift_consistency(op, f, z));
            }
            j["shift"] = {{"samples", cfg_.samples}, {"points_per_sample", cfg_.samples}, {"max_discrepancy", num(worst)}};
            check("shift_identity", worst <= half, worst, half, "<=");
        }

        std::size_t passed = 0, failed = 0;
        for (std::size_t t = 0; t < cfg_.samples; ++t) {
            const SpanElement f = random_supported_element(rng, n);
            const KrylovReport k = krylov_with_escalation(op, f);
            (k.passed() ? passed : failed) += 1;
        }
        j["synthesis"] = {{"trials", cfg_.samples}, {"passed", passed}, {"failed", failed}};
        check("spectral_synthesis", failed == 0, Scalar(static_cast<long>(failed)), Scalar(0), "==");

        write_file("operator.json", j.dump(2) + "\n");
        return j;
    }

    RunConfig cfg_;
    std::filesystem::path out_;
    SpacePtr space_;
    std::shared_ptr<const BiorthogonalSystem> bio_;
    std::vector<std::pair<std::string, long>> escalations_;
    Json stages_ = Json::object();
    Json assertions_ = Json::array();
    Json files_ = Json::array();
    Json error_;
};

} // namespace detail

inline RunOutcome run(RunConfig cfg, const RunOptions& opts = {})
{
    if (opts.precision_override) {
        if (*opts.precision_override < 128)
            throw ConfigError({"precision override must be at least 128 bits"});
        cfg.precision.mantissa_bits = *opts.precision_override;
        cfg.precision.escalation_limit = std::max(cfg.precision.escalation_limit, *opts.precision_override);
    }
    RunOutcome out;
    out.output_dir = opts.output_dir ? std::filesystem::path(*opts.output_dir) : std::filesystem::path(cfg.output_dir);
    detail::Pipeline p(std::move(cfg), out.output_dir);
    out.exit_code = p.run(out.report);
    std::ofstream f(out.output_dir / "report.json", std::ios::binary);
    f << out.report.dump(2) << "\n";
    return out;
}

} // namespace muntz::cli

// Python bindings for the core operations: distribution functions, the
// correlation model, index adjustment, model fitting, and the score
// generator.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <variant>

#include "ispd/betoidal.hpp"
#include "ispd/estimation.hpp"
#include "ispd/indices.hpp"
#include "ispd/rng.hpp"
#include "ispd/simgen.hpp"
#include "ispd/simstudy.hpp"
#include "ispd/specfun.hpp"
#include "ispd/version.hpp"

namespace py = pybind11;
using namespace ispd;

namespace {

CorrelationModelKind model_from_name(const std::string& name) {
    if (name == "fcm") return CorrelationModelKind::Fcm;
    if (name == "ccm") return CorrelationModelKind::Ccm;
    if (name == "ncm") return CorrelationModelKind::Ncm;
    throw py::value_error("model must be one of 'fcm', 'ccm', 'ncm'");
}

py::dict result_to_dict(const FitResult& r) {
    py::dict d;
    d["alpha"] = r.theta_hat.alpha;
    d["beta"] = r.theta_hat.beta;
    d["loglik"] = r.loglik;
    d["se_alpha"] = r.std_errors[0];
    d["se_beta"] = r.std_errors[1];
    d["converged"] = r.converged;
    d["iterations"] = r.iterations;
    d["n_starts"] = r.n_starts;
    return d;
}

Cohort make_cohort(const std::vector<double>& values,
                   const std::vector<int>& sizes, int n_max, bool cells,
                   std::optional<double> trunc) {
    if (values.size() != sizes.size()) {
        throw py::value_error("values and sizes must have the same length");
    }
    Cohort c;
    c.truncation = trunc;
    for (std::size_t i = 0; i < values.size(); ++i) {
        DeptRecord rec;
        rec.id = "d" + std::to_string(i);
        rec.size = sizes[i];
        if (cells) {
            rec.obs = IspdCell{values[i]};
        } else {
            rec.obs = ScaledAvg{values[i]};
        }
        c.records.push_back(std::move(rec));
        c.n_max = std::max(c.n_max, sizes[i]);
    }
    if (n_max > 0) c.n_max = n_max;
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Intra-departmental correlation modeling and index adjustment";
    m.attr("__version__") = kVersion;

    // special functions
    m.def("erf_inv", &specfun::erf_inv, py::arg("p"));
    m.def("norm_cdf", &specfun::norm_cdf, py::arg("z"));
    m.def("norm_quantile", &specfun::norm_quantile, py::arg("q"));
    m.def("owens_t_h0", &specfun::owens_t_h0, py::arg("a"));
    m.def("chi2_sf", &specfun::chi2_sf, py::arg("x"), py::arg("df"));

    // Betoidal distribution
    m.def(
        "betoidal_pdf",
        [](double x, double sigma) {
            return betoidal::pdf(x, {sigma});
        },
        py::arg("x"), py::arg("sigma"));
    m.def(
        "betoidal_cdf",
        [](double x, double sigma) {
            return betoidal::cdf(x, {sigma});
        },
        py::arg("x"), py::arg("sigma"));
    m.def(
        "betoidal_quantile",
        [](double q, double sigma) {
            return betoidal::quantile(q, {sigma});
        },
        py::arg("q"), py::arg("sigma"));
    m.def(
        "betoidal_variance",
        [](double sigma) { return betoidal::variance({sigma}); },
        py::arg("sigma"));
    m.def(
        "beta_shape_equiv",
        [](double sigma) { return betoidal::beta_shape_equiv({sigma}); },
        py::arg("sigma"));
    m.def(
        "betoidal_sample",
        [](double sigma, std::size_t n, std::uint64_t seed) {
            RngStream rng(seed);
            return betoidal::sample({sigma}, n, rng);
        },
        py::arg("sigma"), py::arg("n"), py::arg("seed"));
    m.def(
        "lt_betoidal_cdf",
        [](double x, double sigma, double x_star) {
            return betoidal::lt_cdf(x, {sigma, x_star});
        },
        py::arg("x"), py::arg("sigma"), py::arg("x_star"));
    m.def(
        "lt_betoidal_quantile",
        [](double q, double sigma, double x_star) {
            return betoidal::lt_quantile(q, {sigma, x_star});
        },
        py::arg("q"), py::arg("sigma"), py::arg("x_star"));
    m.def(
        "mle_sigma_iid",
        [](const std::vector<double>& xs) {
            const auto f = betoidal::mle_sigma_iid(xs);
            return py::make_tuple(f.sigma_hat, f.var_of_estimator);
        },
        py::arg("xs"));

    // correlation model
    m.def(
        "rho",
        [](double alpha, double beta, int n, int n_max) {
            return rho_d({alpha, beta}, {n, n_max});
        },
        py::arg("alpha"), py::arg("beta"), py::arg("n"), py::arg("n_max"));
    m.def(
        "sigma",
        [](double alpha, double beta, int n, int n_max) {
            return sigma_d({alpha, beta}, {n, n_max});
        },
        py::arg("alpha"), py::arg("beta"), py::arg("n"), py::arg("n_max"));

    // indices
    m.def("ispd_round", &ispd_round, py::arg("x"));
    m.def("ispd_original", &ispd_original, py::arg("z_tilde"));
    m.def("ispd_theo", &ispd_theo, py::arg("z_tilde"), py::arg("sigma"));
    m.def(
        "ispd_fcm",
        [](double z, int n, int n_max, double alpha, double beta) {
            return ispd_fcm(z, {n, n_max}, {alpha, beta});
        },
        py::arg("z_tilde"), py::arg("n"), py::arg("n_max"), py::arg("alpha"),
        py::arg("beta"));
    m.def(
        "scaled_average",
        [](const std::vector<double>& scores) {
            return scaled_average(scores);
        },
        py::arg("scores"));
    m.def(
        "rho_np",
        [](const std::vector<double>& scores) { return rho_np(scores); },
        py::arg("scores"));
    m.def("rho_rim", &rho_rim, py::arg("dept_scores"));

    // metrics
    m.def(
        "mad",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return mad(a, b);
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "pdc",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return pdc(a, b);
        },
        py::arg("a"), py::arg("b"));

    // fitting
    m.def(
        "fit_scaled",
        [](const std::vector<double>& z, const std::vector<int>& sizes,
           int n_max, const std::string& model) {
            const Cohort c =
                make_cohort(z, sizes, n_max, false, std::nullopt);
            return result_to_dict(
                fit(c, model_from_name(model), LikelihoodKind::Scaled));
        },
        py::arg("z_tilde"), py::arg("sizes"), py::arg("n_max") = 0,
        py::arg("model") = "fcm");
    m.def(
        "fit_cells",
        [](const std::vector<double>& ispd, const std::vector<int>& sizes,
           int n_max, const std::string& model, std::optional<double> trunc) {
            const Cohort c = make_cohort(ispd, sizes, n_max, true, trunc);
            return result_to_dict(
                fit(c, model_from_name(model),
                    trunc ? LikelihoodKind::CoarseTruncated
                          : LikelihoodKind::Coarse));
        },
        py::arg("ispd"), py::arg("sizes"), py::arg("n_max") = 0,
        py::arg("model") = "fcm", py::arg("trunc") = std::nullopt);

    // score generator
    m.def(
        "gen_scores",
        [](int n, double rho_target, std::uint64_t seed) {
            RngStream rng(seed);
            return gen_scores(n, rho_target, ScoreDist::vqr_2010_2014(),
                              rng);
        },
        py::arg("n"), py::arg("rho_target"), py::arg("seed"));
    m.def(
        "triplet_select",
        [](double rho_target, int n) {
            const ClusterTriplet t = triplet_select(rho_target, n);
            return py::make_tuple(t.m, t.k, t.k_check);
        },
        py::arg("rho_target"), py::arg("n"));
    m.def(
        "achieved_rho",
        [](int mm, int k, int k_check, int n) {
            return achieved_rho({mm, k, k_check}, n);
        },
        py::arg("m"), py::arg("k"), py::arg("k_check"), py::arg("n"));
}

#include "bsgd/baselines.hpp"
#include "bsgd/cluster.hpp"
#include "bsgd/config.hpp"
#include "bsgd/experiment.hpp"
#include "bsgd/fixedpoint.hpp"
#include "bsgd/lsqr.hpp"
#include "bsgd/metrics.hpp"
#include "bsgd/phantom.hpp"
#include "bsgd/solver.hpp"
#include "bsgd/tv.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace bsgd;

namespace {

/// A geometry plus its block-partitioned system matrix.
struct PySystem {
  std::shared_ptr<BlockSystem> system;
};

PySystem make_system(const std::string& mode, double op, double od, Index detectors, double pitch,
                     const std::vector<double>& angles, Index side, double voxel, Index row_blocks,
                     Index col_blocks, Index tiles, int threads) {
  GeometryParams gp;
  gp.mode = scan_mode_from_string(mode);
  gp.source_to_center = op;
  gp.center_to_detector = od;
  gp.detector_elements = detectors;
  gp.detector_pitch = pitch;
  gp.angles_deg = angles;
  gp.volume_side = side;
  gp.voxel_size = voxel;
  const Geometry geom = build_geometry(gp);
  return {std::make_shared<BlockSystem>(geom, make_partition(geom, row_blocks, col_blocks, tiles), threads)};
}

py::dict run_config_text(const std::string& text) {
  const ExperimentConfig cfg = parse_config(text);
  const RunLog log = run_experiment(cfg);
  py::dict out;
  out["csv"] = format_csv(log);
  out["x"] = log.x;
  out["epochs_run"] = log.epochs_run;
  out["diverged"] = log.diverged;
  out["block_mults"] = log.totals.block_mults;
  out["bytes_moved"] = log.totals.bytes_moved();
  out["master_storage"] = log.totals.master_storage;
  out["master_storage_alt"] = log.totals.master_storage_alt;
  out["node_storage_peak"] = log.totals.node_storage_peak;
  return out;
}

}  // namespace

PYBIND11_MODULE(_bsgd, m) {
  m.doc() = "Block stochastic gradient descent for CT reconstruction";

  py::register_exception<Error>(m, "BsgdError", PyExc_ValueError);

  py::class_<PySystem>(m, "System")
      .def(py::init(&make_system), py::arg("mode"), py::arg("source_to_center"),
           py::arg("center_to_detector"), py::arg("detector_elements"), py::arg("detector_pitch"),
           py::arg("angles_deg"), py::arg("volume_side"), py::arg("voxel_size") = 1.0,
           py::arg("row_blocks") = 1, py::arg("col_blocks") = 1, py::arg("tiles_per_angle") = 1,
           py::arg("threads") = 1)
      .def_property_readonly("rows", [](const PySystem& s) { return s.system->rows(); })
      .def_property_readonly("cols", [](const PySystem& s) { return s.system->cols(); })
      .def_property_readonly("row_blocks", [](const PySystem& s) { return s.system->row_block_count(); })
      .def_property_readonly("col_blocks", [](const PySystem& s) { return s.system->col_block_count(); })
      .def_property_readonly("nnz", [](const PySystem& s) { return s.system->nnz(); })
      .def("forward", [](const PySystem& s, const Vec& x) { return s.system->forward(x); })
      .def("back", [](const PySystem& s, const Vec& r) { return s.system->back(r); })
      .def("dense", [](const PySystem& s) { return s.system->dense(); })
      .def("row_block", [](const PySystem& s, Index i) { return s.system->row_block(i); })
      .def("col_block", [](const PySystem& s, Index j) { return s.system->col_block(j); });

  m.def("shepp_logan", &shepp_logan, py::arg("side"), py::arg("ndim") = 2);
  m.def("skull_cube", &skull_cube, py::arg("side"));
  m.def("add_noise", &add_noise, py::arg("y"), py::arg("snr_db"), py::arg("seed"));
  m.def("snr_db", &snr_db, py::arg("signal"), py::arg("noise"));

  m.def(
      "lsqr",
      [](const PySystem& s, const Vec& y, double tol, Index max_iters) {
        const LsqrResult r = lsqr_solve(SystemOperator(*s.system), y, tol, max_iters);
        return py::make_tuple(r.x, r.converged, r.iterations);
      },
      py::arg("system"), py::arg("y"), py::arg("tol") = 1e-12, py::arg("max_iters") = 20000);

  m.def(
      "metrics",
      [](const PySystem& s, const Vec& x, const Vec& x_true, const Vec& y, std::optional<Vec> x_lsq) {
        const Metrics mt = compute_metrics(x, x_true, x_lsq ? &*x_lsq : nullptr, *s.system, y);
        py::dict d;
        d["DS"] = mt.ds ? py::object(py::float_(*mt.ds)) : py::object(py::none());
        d["SNR"] = mt.snr;
        d["GAP"] = mt.gap;
        d["snr_capped"] = mt.snr_capped;
        return d;
      },
      py::arg("system"), py::arg("x"), py::arg("x_true"), py::arg("y"), py::arg("x_lsq") = py::none());

  m.def(
      "bsgd",
      [](const PySystem& s, const Vec& y, double mu, Index epochs, Index row_count, Index col_count,
         std::uint64_t seed, int threads) {
        const auto f = SamplingFractions::from_counts(row_count, col_count, s.system->row_block_count(),
                                                      s.system->col_block_count());
        SolverState st = init_state(*s.system, y, mu, seed);
        CostLedger ledger;
        for (Index k = 0; k < epochs; ++k) bsgd_epoch(st, *s.system, f, {threads, &ledger});
        return py::make_tuple(st.x, ledger.totals().block_mults);
      },
      py::arg("system"), py::arg("y"), py::arg("mu"), py::arg("epochs"), py::arg("row_count"),
      py::arg("col_count"), py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "select_alpha_gamma",
      [](Index nodes, Index row_blocks, Index col_blocks) {
        const auto f = select_alpha_gamma(nodes, row_blocks, col_blocks);
        return py::make_tuple(f.alpha, f.gamma, f.row_count, f.col_count);
      },
      py::arg("node_num"), py::arg("row_blocks"), py::arg("col_blocks"));

  m.def(
      "total_variation",
      [](const Vec& x, Index side, int ndim) { return total_variation(x, {side, ndim}); },
      py::arg("x"), py::arg("side"), py::arg("ndim") = 2);
  m.def(
      "tv_prox",
      [](const Vec& x, Index side, int ndim, double weight, int iters, double tol) {
        return tv_prox(x, {side, ndim}, weight, {iters, tol});
      },
      py::arg("x"), py::arg("side"), py::arg("ndim") = 2, py::arg("weight") = 0.0,
      py::arg("iters") = 20, py::arg("tol") = 1e-4);

  m.def(
      "verify_fixed_point",
      [](const PySystem& s, const Vec& y, const Vec& x_star, double mu, Index trials,
         std::uint64_t seed) {
        const auto r = verify_fixed_point(*s.system, y, x_star, mu, trials, seed);
        py::dict d;
        d["state_norm"] = r.state_norm;
        d["normal_residual"] = r.normal_residual;
        d["aligned_change"] = r.aligned_change;
        d["independent_change"] = r.independent_change;
        d["perturbed_aligned_change"] = r.perturbed_aligned_change;
        d["perturbed_independent_change"] = r.perturbed_independent_change;
        return d;
      },
      py::arg("system"), py::arg("y"), py::arg("x_star"), py::arg("mu"), py::arg("trials") = 100,
      py::arg("seed") = 1);

  m.def("run_config", &run_config_text, py::arg("text"),
        "Runs an experiment described in the config grammar and returns the CSV log, the final "
        "image and ledger totals.");
  m.attr("CSV_HEADER") = kCsvHeader;
}

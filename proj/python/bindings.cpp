// Python bindings for the core edgeshare operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edgeshare/bloom.hpp"
#include "edgeshare/curve.hpp"
#include "edgeshare/error.hpp"
#include "edgeshare/json_io.hpp"
#include "edgeshare/ledger.hpp"
#include "edgeshare/profiler.hpp"
#include "edgeshare/quasigroup.hpp"
#include "edgeshare/secret_split.hpp"
#include "edgeshare/secure_zone.hpp"
#include "edgeshare/simnet.hpp"

namespace py = pybind11;
using namespace edgeshare;

namespace {

py::bytes to_py(ByteView b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

Bytes from_py(const py::bytes& b) {
  const std::string s = b;
  return Bytes(s.begin(), s.end());
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_py(const py::bytes& b, const char* what) {
  const std::string s = b;
  if (s.size() != N) throw py::value_error(std::string(what) + " must be " + std::to_string(N) + " bytes");
  std::array<std::uint8_t, N> out{};
  std::copy(s.begin(), s.end(), out.begin());
  return out;
}

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json py_to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict report_dict(const IdentityReport& r) {
  py::list failures;
  for (const auto& f : r.failures) failures.append(py::make_tuple(f.identity, f.x, f.y));
  py::dict d;
  d["passed"] = r.passed;
  d["pairs_checked"] = r.pairs_checked;
  d["failures"] = failures;
  return d;
}

py::dict entry_dict(const LedgerEntry& e) {
  py::dict d;
  d["index"] = e.index;
  d["device_label"] = e.device_label;
  d["h1"] = to_hex(e.h1);
  d["h2"] = to_hex(e.h2);
  d["sequence"] = e.timestamp.sequence;
  return d;
}

py::tuple chain_tuple(const ChainReport& r) {
  return py::make_tuple(r.valid, r.first_bad_index ? py::cast(*r.first_bad_index) : py::none());
}

// An edge node with a logical-clock timestamp authority, a secure zone and an
// identity ledger; the convenient unit for scripting.
class EdgeNode {
 public:
  EdgeNode(std::string group_id, std::optional<std::uint64_t> seed)
      : tsa_("py-tsa", [this] { return ++tick_; }),
        zone_(tsa_, seed),
        ledger_(std::move(group_id), WeierstrassCurve::default_curve()) {}

  py::dict register_device(const std::string& label, std::uint64_t seed) {
    return entry_dict(zone_.register_device(ledger_, label, seed));
  }

  std::string generate_key(const std::string& purpose, std::uint64_t budget, std::optional<std::uint64_t> seed) {
    return to_hex(zone_.generate_key(parse_key_purpose(purpose), budget, seed));
  }

  py::object split_and_distribute(const std::string& key_id, const std::string& device_id,
                                  std::uint32_t order, std::optional<std::uint64_t> seed) {
    const Distribution d =
        zone_.split_and_distribute(fixed_from_hex<16>(key_id), fixed_from_hex<32>(device_id), order, seed);
    return json_to_py(to_json(d.cloud_share));
  }

  py::object issue_timestamp(const std::string& device_id) {
    return json_to_py(to_json(tsa_.issue(fixed_from_hex<32>(device_id))));
  }

  py::tuple authorize(const std::string& device_id, const py::object& cloud_share, const py::object& timestamp) {
    const ContextId ctx = fixed_from_hex<32>(device_id);
    const Timestamp ts = timestamp.is_none() ? tsa_.issue(ctx) : timestamp_from_json(py_to_json(timestamp));
    const Decision d = zone_.authorize_transaction(ctx, sealed_share_from_json(py_to_json(cloud_share)), ts);
    return py::make_tuple(d.accepted, d.reason ? py::cast(std::string(to_string(*d.reason))) : py::none());
  }

  void retire_key(const std::string& key_id) { zone_.retire_key(fixed_from_hex<16>(key_id)); }

  py::tuple verify_chain() const { return chain_tuple(ledger_.verify_chain()); }
  std::string snapshot() const { return sync_to_cloud(ledger_).jsonl; }
  py::object public_state() const { return json_to_py(zone_.public_state()); }

  py::list audit_log() const {
    py::list out;
    for (const auto& r : zone_.audit_log()) out.append(json_to_py(nlohmann::json::parse(r.to_json_line())));
    return out;
  }

  py::list devices() const {
    py::list out;
    for (const auto& e : ledger_.entries()) out.append(entry_dict(e));
    return out;
  }

 private:
  std::uint64_t tick_ = 0;
  TimestampAuthority tsa_;
  SecureZone zone_;
  IdentityLedger ledger_;
};

}  // namespace

PYBIND11_MODULE(_edgeshare, m) {
  m.doc() = "Edge/cloud identity ledger, quasigroup secret splitting and simulation";

  // Raised for library errors; `code` carries the machine-readable name.
  static PyObject* error_type = PyErr_NewException("edgeshare.EdgeshareError", PyExc_RuntimeError, nullptr);
  m.attr("EdgeshareError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def("sha256", [](const py::bytes& data) { return to_py(sha256(from_py(data))); });

  py::class_<Quasigroup>(m, "Quasigroup")
      .def_static("generate", &Quasigroup::generate, py::arg("order"), py::arg("seed"))
      .def_static("from_table", &Quasigroup::from_table, py::arg("table"))
      .def_property_readonly("order", &Quasigroup::order)
      .def_property_readonly("table", &Quasigroup::rows)
      .def("multiply", &Quasigroup::multiply)
      .def("left_divide", &Quasigroup::left_divide, py::arg("x"), py::arg("y"))
      .def("right_divide", &Quasigroup::right_divide, py::arg("y"), py::arg("x"))
      .def("canonical_bytes", [](const Quasigroup& q) { return to_py(q.canonical_bytes()); })
      .def(
          "verify_identities",
          [](const Quasigroup& q, std::optional<std::uint32_t> samples, std::uint64_t seed) {
            if (samples) return report_dict(verify_parastroph_identities(q, Sampled{*samples, seed}));
            return report_dict(verify_parastroph_identities(q, Exhaustive{}));
          },
          py::arg("samples") = py::none(), py::arg("seed") = 0);
  m.def("is_latin_square", &is_latin_square, py::arg("table"));

  m.def("encode_secret", [](const py::bytes& s, std::uint32_t order) { return encode_secret(from_py(s), order); });
  m.def("decode_secret", [](const std::vector<Element>& digits, std::uint32_t order, std::size_t len) {
    return to_py(decode_secret(digits, order, len));
  });
  m.def(
      "split_secret",
      [](const py::bytes& secret, const Quasigroup& q, std::uint64_t seed) {
        const SplitResult r = split(from_py(secret), q, ContextId{}, seed);
        return py::make_tuple(r.first.digits, r.second.digits);
      },
      py::arg("secret"), py::arg("quasigroup"), py::arg("seed"),
      "Returns the (edge, cloud) digit vectors of a 2-of-2 split.");
  m.def(
      "combine_shares",
      [](const std::vector<Element>& first, const std::vector<Element>& second, const Quasigroup& q,
         std::size_t secret_len) { return to_py(decode_secret(combine_digits(first, second, q), q.order(), secret_len)); },
      py::arg("first"), py::arg("second"), py::arg("quasigroup"), py::arg("secret_len"));

  m.def(
      "is_on_curve",
      [](const std::string& p, const std::vector<std::string>& a, const std::string& x, const std::string& y) {
        if (a.size() != 5) throw py::value_error("expected five coefficients a1, a2, a3, a4, a6");
        const WeierstrassCurve c(CurveCoefficients{mpz_from_hex(p), mpz_from_hex(a[0]), mpz_from_hex(a[1]),
                                                   mpz_from_hex(a[2]), mpz_from_hex(a[3]), mpz_from_hex(a[4])});
        return is_on_curve(c, CurvePoint::affine(mpz_from_hex(x), mpz_from_hex(y)));
      },
      py::arg("p_hex"), py::arg("coefficients_hex"), py::arg("x_hex"), py::arg("y_hex"));

  py::class_<EdgeNode>(m, "EdgeNode")
      .def(py::init<std::string, std::optional<std::uint64_t>>(), py::arg("group_id") = "default",
           py::arg("seed") = py::none())
      .def("register_device", &EdgeNode::register_device, py::arg("label"), py::arg("seed"))
      .def("generate_key", &EdgeNode::generate_key, py::arg("purpose") = "data-encryption",
           py::arg("budget") = kDefaultUsageBudget, py::arg("seed") = py::none())
      .def("split_and_distribute", &EdgeNode::split_and_distribute, py::arg("key_id"), py::arg("device_id"),
           py::arg("order") = kDefaultShareOrder, py::arg("seed") = py::none())
      .def("issue_timestamp", &EdgeNode::issue_timestamp, py::arg("device_id"))
      .def("authorize", &EdgeNode::authorize, py::arg("device_id"), py::arg("cloud_share"),
           py::arg("timestamp") = py::none())
      .def("retire_key", &EdgeNode::retire_key)
      .def("verify_chain", &EdgeNode::verify_chain)
      .def("snapshot", &EdgeNode::snapshot)
      .def("public_state", &EdgeNode::public_state)
      .def("audit_log", &EdgeNode::audit_log)
      .def("devices", &EdgeNode::devices);

  m.def("verify_snapshot", [](const std::string& jsonl) { return chain_tuple(parse_snapshot(jsonl).verify()); });

  m.def(
      "fit_distribution",
      [](const std::vector<double>& values, const std::string& label) {
        const FitReport r = fit_distribution({values, label});
        py::dict per_family;
        for (std::size_t i = 0; i < kFamilies.size(); ++i) {
          per_family[py::str(std::string(to_string(kFamilies[i])))] = r.per_family_rss[i];
        }
        py::dict d;
        d["device_label"] = r.device_label;
        d["best_family"] = std::string(to_string(r.best_family));
        d["params"] = r.params;
        d["rss"] = r.rss;
        d["per_family_rss"] = per_family;
        return d;
      },
      py::arg("values"), py::arg("label") = "");
  m.def("detect_outliers", &detect_outliers, py::arg("values"), py::arg("threshold_sigmas") = 3.0);

  py::class_<BloomFilter>(m, "BloomFilter")
      .def_static("create", &BloomFilter::create, py::arg("expected_n"), py::arg("target_fpr"))
      .def_property_readonly("m", &BloomFilter::bit_count)
      .def_property_readonly("k", &BloomFilter::hash_count)
      .def_property_readonly("n_inserted", &BloomFilter::inserted)
      .def("insert", [](BloomFilter& f, const py::bytes& id) { f.insert(fixed_from_py<32>(id, "device id")); })
      .def("contains", [](const BloomFilter& f, const py::bytes& id) { return f.contains(fixed_from_py<32>(id, "device id")); })
      .def("estimated_fpr", &BloomFilter::estimated_fpr)
      .def("serialize", [](const BloomFilter& f) { return to_py(f.serialize()); })
      .def_static("deserialize", [](const py::bytes& raw) { return BloomFilter::deserialize(from_py(raw)); });

  m.def("builtin_scenarios", [] {
    py::list out;
    for (const auto& s : builtin_scenarios()) out.append(json_to_py(to_json(s)));
    return out;
  });
  m.def(
      "run_scenario",
      [](const py::object& scenario) {
        const SimResult r = run_scenario(scenario_from_json(py_to_json(scenario)));
        py::dict d;
        d["passed"] = r.passed;
        d["diffs"] = r.diffs;
        d["attacks"] = r.attacks;
        d["attacks_detected"] = r.attacks_detected;
        d["event_log"] = r.event_log();
        return d;
      },
      py::arg("scenario"));
}

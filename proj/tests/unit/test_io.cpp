#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "aimrom/config.hpp"
#include "aimrom/error.hpp"
#include "aimrom/io.hpp"
#include "aimrom/plot.hpp"
#include "aimrom/rom.hpp"
#include "aimrom/serialize.hpp"
#include "aimrom/store.hpp"

using namespace aimrom;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aimrom_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Mat random_mat(int r, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace

TEST_CASE("sha256 known digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("doubles print shortest and round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv round trip and column lookup") {
  const fs::path dir = scratch("csv");
  const Mat m = random_mat(7, 3, 1);
  write_csv(dir / "a.csv", {"t", "u@0", "u@1"}, m);
  const CsvTable t = read_csv(dir / "a.csv");
  CHECK(t.header == std::vector<std::string>{"t", "u@0", "u@1"});
  CHECK(t.values == m);
  CHECK(t.column("u@1") == 2);
  CHECK(t.column("nope") == -1);
  CHECK(t.col("t") == m.col(0));
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), MissingArtifact);
  CHECK(csv_string({"x"}, Mat::Constant(1, 1, 2.5)) == "x\n2.5\n");
  Vec g(2);
  g << 0.0, 0.5;
  CHECK(field_header(g) == std::vector<std::string>{"t", "u@0", "u@0.5"});
}

TEST_CASE("serialization round trips are exact") {
  const Mat m = random_mat(4, 5, 2);
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  CHECK(matrix_from_json(Json::parse(matrix_to_json(m).dump())) == m);
  const Mlp net = Mlp::glorot({3, 7, 2}, 4);
  const Mlp back = mlp_from_json(Json::parse(to_json(net).dump()));
  CHECK(back.parameters() == net.parameters());
  const Vec x = Vec::LinSpaced(3, -1, 1);
  CHECK(forward(back, x) == forward(net, x));

  const PodModel pod = pod_fit(random_mat(10, 6, 3), true);
  const PodModel pb = pod_from_json(Json::parse(to_json(pod).dump()));
  CHECK(pb.modes == pod.modes);
  CHECK(pb.mean == pod.mean);
  CHECK(pb.centered);

  const Mat pts = random_mat(40, 2, 5);
  DiffusionMap dm = dmaps_fit(pts, median_bandwidth(pts), 3);
  dm.kept_indices = {1, 3};
  const DiffusionMap db = dmaps_from_json(Json::parse(to_json(dm).dump()));
  CHECK(db.eigenvectors == dm.eigenvectors);
  CHECK(db.kept_indices == dm.kept_indices);
  CHECK(nystrom_restrict_batch(db, pts.topRows(3)) == nystrom_restrict_batch(dm, pts.topRows(3)));

  const GeometricHarmonics gh = gh_fit(pts, random_mat(40, 2, 6), 1.0);
  const GeometricHarmonics gb = gh_from_json(Json::parse(to_json(gh).dump()));
  CHECK(gh_extend_batch(gb, pts) == gh_extend_batch(gh, pts));

  const Autoencoder ae = make_autoencoder(4, {6}, 2, 9);
  Mat cand;
  const Autoencoder ab = autoencoder_from_json(Json::parse(to_json(ae, Mat::Ones(3, 2)).dump()), &cand);
  CHECK(ab.decoder.parameters() == ae.decoder.parameters());
  CHECK(cand == Mat::Ones(3, 2));

  LearnedField f;
  f.kind = FieldKind::gray_box;
  f.dim = 2;
  f.base_spec = BaseFieldSpec{"chafee", 2, ModelParams{0.16, 1.0}};
  f.base = f.base_spec->build();
  f.net = Mlp::glorot({2, 4, 2}, 1);
  const LearnedField fb = learned_field_from_json(Json::parse(to_json(f).dump()));
  CHECK(fb.kind == FieldKind::gray_box);
  Vec a(2);
  a << 0.7, -0.2;
  CHECK(fb(a) == f(a));
  f.base_spec.reset();
  CHECK_THROWS_AS(to_json(f), InvalidInput);
}

TEST_CASE("model store: hashes, persistence, kinds") {
  const fs::path dir = scratch("store");
  const Json model = to_json(Mlp::glorot({2, 3, 1}, 1));
  std::string h;
  {
    ModelStore s(dir);
    h = s.put("closure", "mlp", model, Json{{"seed", 1}});
    CHECK(h == sha256_hex(model.dump()));
    CHECK(s.put("copy", "mlp", model) == h);  // same content, same hash
    CHECK(fs::exists(dir / "models" / (h + ".json")));
  }
  ModelStore s(dir);
  CHECK(s.aliases() == std::vector<std::string>{"closure", "copy"});
  CHECK(s.entry("closure").hash == h);
  CHECK(s.model("closure", "mlp") == model);
  CHECK(s.provenance("closure").at("seed") == 1);
  CHECK(s.provenance("copy").empty());
  CHECK_THROWS_AS(s.model("closure", "pod"), InvalidInput);
  try {
    s.entry("lift");
    FAIL("expected MissingArtifact");
  } catch (const MissingArtifact& e) {
    CHECK(std::string(e.what()).find("closure, copy") != std::string::npos);
  }
  // tampering is caught on load
  write_file(dir / "models" / (h + ".json"), "{\"model\": {\"x\": 1}}");
  ModelStore t(dir);
  CHECK_THROWS_AS(t.model("closure", "mlp"), MissingArtifact);
}

TEST_CASE("config sections cite line numbers") {
  const std::string text = "{\n  \"n\": 3,\n  \"bogus\": true,\n  \"sub\": {\"dt\": -1}\n}\n";
  auto src = std::make_shared<ConfigSource>(ConfigSource{text, "c.json"});
  const Json j = parse_config(text, "c.json");
  CHECK(src->line_of("bogus") == 3);
  ConfigSection s(j, "", src);
  CHECK(s.integer("n") == 3);
  CHECK(s.number("missing", 2.5) == 2.5);
  CHECK_THROWS_AS(s.text("n"), ConfigError);
  ConfigSection sub = s.section("sub");
  CHECK(sub.number("dt") == -1);
  sub.finish();
  try {
    s.finish();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[1,2]", "x"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"a\": ", "x"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/aimrom.json"), ConfigError);
}

TEST_CASE("config typed accessors") {
  const Json j = parse_config(
      R"({"c": "pod", "v": [1, 2], "b": [-1, 1], "bb": [[0, 1], [2, 3]], "m": {"rhs": "x"}, "i": 2.5})", "t");
  ConfigSection s(j, "", nullptr);
  CHECK_THROWS_AS(s.choice("c", {"fourier", "dmaps"}), ConfigError);
  CHECK(s.vector("v") == Vec::LinSpaced(2, 1, 2));
  CHECK(s.box("b", 3).size() == 3);
  CHECK(s.box("bb", 2)[1].second == 3);
  CHECK_THROWS_AS(s.box("bb", 3), ConfigError);
  CHECK(s.string_map("m").at("rhs") == "x");
  CHECK_THROWS_AS(s.integer("i"), ConfigError);
}

TEST_CASE("seed override reaches every level") {
  Json j = Json::parse(R"({"seed": 1, "train": {"seed": 2, "inner": [{"seed": 3}]}, "other": 4})");
  override_seeds(j, 99);
  CHECK(j["seed"] == 99);
  CHECK(j["train"]["seed"] == 99);
  CHECK(j["train"]["inner"][0]["seed"] == 99);
  CHECK(j["other"] == 4);
}

TEST_CASE("svg plots carry provenance and every series") {
  LinePlot p;
  p.title = "error <vs> time";
  p.provenance = "config=abc & seed=1";
  p.series.push_back({"raw", Vec::LinSpaced(5, 0, 1), Vec::LinSpaced(5, 1, 2)});
  p.series.push_back({"corrected", Vec::LinSpaced(5, 0, 1), Vec::Constant(5, 0.5)});
  const std::string svg = render_svg(p);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("config=abc") != std::string::npos);
  CHECK(svg.find("&lt;vs&gt;") != std::string::npos);
  CHECK(svg.find("corrected") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  p.series[0].y[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK(render_svg(p).find("nan") == std::string::npos);
}

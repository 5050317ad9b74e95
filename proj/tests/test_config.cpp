#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "autores/config.hpp"
#include "autores/csv.hpp"
#include "autores/error.hpp"

using namespace autores;

TEST_SUITE("config") {

TEST_CASE("parse and defaults") {
  const auto c = parse_config(R"(
# comment
[system]
detuning = 0.59   # operating point
quality = 9000
t1_ns = 1000

[pulse]
duration = 200
envelope = raised_cosine
ramp = 20

[sweep]
parameter = amplitude
start = 0.05
stop = 0.2
steps = 4

[ensemble]
n_runs = 10
seed0 = 123456789012

[engine]
name = quantum
)");
  CHECK(c.system.detuning == 0.59);
  CHECK(c.system.kappa == doctest::Approx(5.3445 / 9000));
  CHECK(c.system.gamma1 == doctest::Approx(gamma1_from_t1(1000)));
  CHECK(c.pulse.duration == 200);
  CHECK(c.pulse.envelope == Envelope::raised_cosine);
  CHECK(c.sweep.values().size() == 4);
  CHECK(c.sweep.values().back() == 0.2);
  CHECK(c.seed0 == 123456789012ULL);
  CHECK(c.engine == Engine::quantum);
  CHECK(c.system.g01 == 0.118);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("canonical text round-trips") {
  auto c = parse_config("[system]\ndetuning = -0.123456789\n[analysis]\npump_nbar = 0.4,10\nt_capture = 150\n");
  const auto text = c.to_text();
  const auto again = parse_config(text);
  CHECK(again.to_text() == text);
  CHECK(again.content_hash() == c.content_hash());
  CHECK(again.analysis.t_capture.value() == 150);

  const auto back = config_from_metadata(c.entries());
  CHECK(back.to_text() == text);
}

TEST_CASE("errors carry field paths") {
  CHECK_THROWS_WITH_AS(parse_config("[system]\nbogus = 1\n"), doctest::Contains("system.bogus"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[system]\nkappa = abc\n"), doctest::Contains("system.kappa"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[system]\nkappa = 1\nkappa = 2\n"), doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\nkappa = 1\nquality = 9000\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("kappa = 1\n"), ConfigError);

  auto c = parse_config("[system]\nkappa = -1\n");
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("system.kappa"), ConfigError);
  c = parse_config("[analysis]\ncut_fraction = 1.5\n");
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("analysis.cut_fraction"), ConfigError);
  c = parse_config("[sweep]\nparameter = flux\n");
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("sweep.parameter"), ConfigError);
  CHECK_THROWS_AS(parse_config("[engine]\nname = magic\n"), ConfigError);
}

TEST_CASE("git blob hash") {
  // git hash-object of "hello\n"
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -6e-5, 5.3445, 1e300, 0.0}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("CSV metadata block") {
  CsvTable t;
  t.meta = {{"command", "test"}, {"system.detuning", "0.5"}};
  t.columns = {"a", "b"};
  t.add_row({"1", "2"});
  CHECK_THROWS(t.add_row({"1"}));
  const auto path = std::filesystem::temp_directory_path() / "autores_csv_test.csv";
  t.write(path);
  const auto meta = read_metadata(path);
  REQUIRE(meta.size() == 2);
  CHECK(meta[1].first == "system.detuning");
  CHECK(meta[1].second == "0.5");
  CHECK(config_from_metadata(meta).system.detuning == 0.5);
  std::filesystem::remove(path);
}

}

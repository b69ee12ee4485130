#include "scanneal/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scanneal/errors.hpp"
#include "scanneal/format.hpp"

namespace scanneal {

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

struct LineContext {
  const std::filesystem::path& path;
  std::size_t number;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInputError(path.string() + ":" + std::to_string(number) +
                            ": " + msg);
  }
};

long long parse_int(const LineContext& ctx, const std::string& tok) {
  long long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    ctx.fail("expected integer, got '" + tok + "'");
  return v;
}

double parse_value(const LineContext& ctx, const std::string& tok) {
  try {
    return parse_double(tok);
  } catch (const InvalidInputError&) {
    ctx.fail("expected number, got '" + tok + "'");
  }
}

std::uint64_t parse_u64(const LineContext& ctx, const std::string& tok) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    ctx.fail("expected unsigned integer, got '" + tok + "'");
  return v;
}

}  // namespace

void save_instance(const InstanceArtifact& artifact,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());

  const auto& meta = artifact.metadata;
  if (!meta.family.empty()) out << "# meta family " << meta.family << "\n";
  out << "# meta seed " << meta.seed << "\n";
  for (const auto& [key, value] : meta.params)
    out << "# meta param " << key << " " << value << "\n";

  const IsingModel& m = artifact.model;
  out << "ising " << m.num_vertices() << "\n";
  for (const auto& c : m.couplings())
    out << "J " << c.x << " " << c.y << " " << format_double(c.value) << "\n";
  for (int x = 0; x < m.num_vertices(); ++x)
    if (m.field(x) != 0.0)
      out << "h " << x << " " << format_double(m.field(x)) << "\n";

  if (artifact.tsp) {
    const TspInstance& t = *artifact.tsp;
    out << "tsp " << t.num_cities() << " " << format_double(t.penalty_a())
        << " " << format_double(t.tour_weight_b()) << "\n";
    for (int i = 0; i < t.num_cities(); ++i)
      for (int j = i + 1; j < t.num_cities(); ++j)
        out << "d " << i << " " << j << " " << t.distance(i, j) << "\n";
  }

  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

InstanceArtifact load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());

  InstanceMetadata meta;
  meta.family = "file";
  int num_vertices = -1;
  std::vector<Coupling> couplings;
  std::vector<double> fields;
  int tsp_cities = -1;
  double tsp_a = 0.0, tsp_b = 0.0;
  std::vector<int> distances;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const LineContext ctx{path, line_number};
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;

    if (tokens[0] == "#") {
      if (tokens.size() >= 4 && tokens[1] == "meta" && tokens[2] == "family") {
        meta.family = tokens[3];
      } else if (tokens.size() >= 4 && tokens[1] == "meta" &&
                 tokens[2] == "seed") {
        meta.seed = parse_u64(ctx, tokens[3]);
      } else if (tokens.size() >= 5 && tokens[1] == "meta" &&
                 tokens[2] == "param") {
        std::string value = tokens[4];
        for (std::size_t i = 5; i < tokens.size(); ++i) value += " " + tokens[i];
        meta.params.emplace_back(tokens[3], value);
      }
      continue;
    }

    if (tokens[0] == "ising") {
      if (num_vertices >= 0) ctx.fail("duplicate ising header");
      if (tokens.size() != 2) ctx.fail("expected 'ising <N>'");
      const long long n = parse_int(ctx, tokens[1]);
      if (n < 1 || n > 10000000) ctx.fail("vertex count out of range");
      num_vertices = static_cast<int>(n);
      fields.assign(static_cast<std::size_t>(num_vertices), 0.0);
      continue;
    }
    if (num_vertices < 0) ctx.fail("record before 'ising <N>' header");

    if (tokens[0] == "J") {
      if (tokens.size() != 4) ctx.fail("expected 'J <x> <y> <value>'");
      const long long x = parse_int(ctx, tokens[1]);
      const long long y = parse_int(ctx, tokens[2]);
      if (x < 0 || y < 0 || x >= num_vertices || y >= num_vertices)
        ctx.fail("vertex index out of range");
      if (x >= y) ctx.fail("coupling must be written with x < y");
      const double v = parse_value(ctx, tokens[3]);
      if (v == 0.0) ctx.fail("zero coupling");
      couplings.push_back(
          {static_cast<int>(x), static_cast<int>(y), v});
      continue;
    }
    if (tokens[0] == "h") {
      if (tokens.size() != 3) ctx.fail("expected 'h <x> <value>'");
      const long long x = parse_int(ctx, tokens[1]);
      if (x < 0 || x >= num_vertices) ctx.fail("vertex index out of range");
      fields[static_cast<std::size_t>(x)] = parse_value(ctx, tokens[2]);
      continue;
    }
    if (tokens[0] == "tsp") {
      if (tokens.size() != 4) ctx.fail("expected 'tsp <n> <A> <B>'");
      if (tsp_cities >= 0) ctx.fail("duplicate tsp record");
      const long long n = parse_int(ctx, tokens[1]);
      if (n < 3 || n * n != num_vertices)
        ctx.fail("tsp city count inconsistent with vertex count");
      tsp_cities = static_cast<int>(n);
      tsp_a = parse_value(ctx, tokens[2]);
      tsp_b = parse_value(ctx, tokens[3]);
      distances.assign(static_cast<std::size_t>(tsp_cities) * tsp_cities, 0);
      continue;
    }
    if (tokens[0] == "d") {
      if (tsp_cities < 0) ctx.fail("'d' record before 'tsp' record");
      if (tokens.size() != 4) ctx.fail("expected 'd <i> <j> <value>'");
      const long long i = parse_int(ctx, tokens[1]);
      const long long j = parse_int(ctx, tokens[2]);
      if (i < 0 || j < 0 || i >= tsp_cities || j >= tsp_cities)
        ctx.fail("city index out of range");
      if (i >= j) ctx.fail("distance must be written with i < j");
      const long long v = parse_int(ctx, tokens[3]);
      if (v < 1 || v > 1000000000) ctx.fail("distance out of range");
      distances[static_cast<std::size_t>(i) * tsp_cities + j] =
          static_cast<int>(v);
      distances[static_cast<std::size_t>(j) * tsp_cities + i] =
          static_cast<int>(v);
      continue;
    }
    ctx.fail("unknown record '" + tokens[0] + "'");
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  if (num_vertices < 0)
    throw InvalidInputError(path.string() + ": missing 'ising <N>' header");

  try {
    IsingModel model(num_vertices, std::move(couplings), std::move(fields));
    std::optional<TspInstance> tsp;
    if (tsp_cities >= 0)
      tsp.emplace(tsp_cities, std::move(distances), tsp_a, tsp_b);
    return InstanceArtifact{std::move(model), std::move(meta), std::move(tsp)};
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

}  // namespace scanneal

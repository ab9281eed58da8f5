#include "plasmon/error.hpp"
#include "plasmon/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace plasmon {

namespace {

struct Line {
  std::size_t number;  // 1-based
  std::vector<std::string_view> tokens;
};

// Splits text into non-empty lines of whitespace-separated tokens, with '#'
// comments removed.
std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    ++number;
    auto body = text.substr(pos, end - pos);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    Line line{number, {}};
    std::size_t i = 0;
    while (i < body.size()) {
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
      const std::size_t start = i;
      while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
      if (i > start) line.tokens.push_back(body.substr(start, i - start));
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

double parse_double(std::string_view token, std::size_t line) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    throw ParseError(line, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

long parse_int(std::string_view token, std::size_t line) {
  long value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

SurfaceMesh parse_off(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty() || lines[0].tokens[0] != "OFF") {
    throw ParseError(lines.empty() ? 1 : lines[0].number, "missing 'OFF' header");
  }

  // Counts may share the header line.
  std::vector<std::string_view> counts(lines[0].tokens.begin() + 1,
                                       lines[0].tokens.end());
  std::size_t next = 1;
  std::size_t count_line = lines[0].number;
  if (counts.empty()) {
    if (lines.size() < 2) throw ParseError(lines[0].number + 1, "missing counts line");
    counts = lines[1].tokens;
    count_line = lines[1].number;
    next = 2;
  }
  if (counts.size() < 2) throw ParseError(count_line, "expected 'V F E' counts");
  const long nv = parse_int(counts[0], count_line);
  const long nf = parse_int(counts[1], count_line);
  if (nv < 0 || nf < 0) throw ParseError(count_line, "negative element count");

  SurfaceMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  mesh.triangles.reserve(static_cast<std::size_t>(nf));
  for (long v = 0; v < nv; ++v, ++next) {
    if (next >= lines.size()) {
      throw ParseError(lines.back().number + 1, "unexpected end of file in vertex list");
    }
    const auto& line = lines[next];
    if (line.tokens.size() < 3) throw ParseError(line.number, "vertex needs 3 coordinates");
    mesh.vertices.emplace_back(parse_double(line.tokens[0], line.number),
                               parse_double(line.tokens[1], line.number),
                               parse_double(line.tokens[2], line.number));
  }
  for (long f = 0; f < nf; ++f, ++next) {
    if (next >= lines.size()) {
      throw ParseError(lines.back().number + 1, "unexpected end of file in face list");
    }
    const auto& line = lines[next];
    const long arity = parse_int(line.tokens[0], line.number);
    if (arity != 3) {
      throw ParseError(line.number, "only triangular faces are supported");
    }
    if (line.tokens.size() < 4) throw ParseError(line.number, "face needs 3 indices");
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      const long index = parse_int(line.tokens[1 + k], line.number);
      if (index < 0 || index >= nv) {
        throw ParseError(line.number, "vertex index " + std::to_string(index) +
                                          " out of range");
      }
      t[k] = static_cast<int>(index);
    }
    mesh.triangles.push_back(t);
  }
  return mesh;
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(k.x);
    h = h * 1000003u ^ std::hash<std::int64_t>{}(k.y);
    h = h * 1000003u ^ std::hash<std::int64_t>{}(k.z);
    return h;
  }
};

// Merges triangle-soup corners closer than `tol` into shared vertices.
SurfaceMesh weld(const std::vector<Vec3>& corners, double tol) {
  SurfaceMesh mesh;
  std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
  auto cell_of = [tol](const Vec3& p) {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x() / tol)),
                   static_cast<std::int64_t>(std::floor(p.y() / tol)),
                   static_cast<std::int64_t>(std::floor(p.z() / tol))};
  };
  std::vector<int> index_of(corners.size());
  for (std::size_t c = 0; c < corners.size(); ++c) {
    const Vec3& p = corners[c];
    const CellKey home = cell_of(p);
    int found = -1;
    for (std::int64_t dx = -1; dx <= 1 && found < 0; ++dx) {
      for (std::int64_t dy = -1; dy <= 1 && found < 0; ++dy) {
        for (std::int64_t dz = -1; dz <= 1 && found < 0; ++dz) {
          const auto it = grid.find({home.x + dx, home.y + dy, home.z + dz});
          if (it == grid.end()) continue;
          for (const int v : it->second) {
            if ((mesh.vertices[v] - p).norm() <= tol) {
              found = v;
              break;
            }
          }
        }
      }
    }
    if (found < 0) {
      found = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(p);
      grid[home].push_back(found);
    }
    index_of[c] = found;
  }
  for (std::size_t f = 0; f + 2 < corners.size(); f += 3) {
    mesh.triangles.push_back({index_of[f], index_of[f + 1], index_of[f + 2]});
  }
  return mesh;
}

SurfaceMesh parse_stl(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty() || lines[0].tokens[0] != "solid") {
    throw ParseError(lines.empty() ? 1 : lines[0].number,
                     "expected ASCII STL 'solid' header (binary STL is not supported)");
  }

  // Flatten the remaining lines into a token stream that remembers line numbers.
  struct Token {
    std::string_view text;
    std::size_t line;
  };
  std::vector<Token> tokens;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].tokens[0] == "endsolid") {
      tokens.push_back({"endsolid", lines[i].number});
      break;
    }
    for (const auto t : lines[i].tokens) tokens.push_back({t, lines[i].number});
  }

  std::size_t pos = 0;
  auto line_here = [&] {
    return pos < tokens.size() ? tokens[pos].line
                               : (tokens.empty() ? lines[0].number + 1
                                                 : tokens.back().line + 1);
  };
  auto expect = [&](std::string_view word) {
    if (pos >= tokens.size() || tokens[pos].text != word) {
      throw ParseError(line_here(), "expected '" + std::string(word) + "'");
    }
    ++pos;
  };
  auto number = [&] {
    if (pos >= tokens.size()) throw ParseError(line_here(), "unexpected end of file");
    const auto& t = tokens[pos++];
    return parse_double(t.text, t.line);
  };

  std::vector<Vec3> corners;
  while (true) {
    if (pos >= tokens.size()) throw ParseError(line_here(), "missing 'endsolid'");
    if (tokens[pos].text == "endsolid") break;
    expect("facet");
    expect("normal");
    for (int k = 0; k < 3; ++k) number();  // stored normals are recomputed
    expect("outer");
    expect("loop");
    for (int k = 0; k < 3; ++k) {
      expect("vertex");
      const double x = number();
      const double y = number();
      const double z = number();
      corners.emplace_back(x, y, z);
    }
    expect("endloop");
    expect("endfacet");
  }
  if (corners.empty()) throw ParseError(line_here(), "STL contains no facets");

  SurfaceMesh soup;
  soup.vertices = corners;
  const double diag = bbox_diagonal(soup);
  if (!(diag > 0.0)) throw ParseError(lines[0].number, "STL geometry has zero extent");
  return weld(corners, 1e-9 * diag);
}

std::string lowercase_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

SurfaceMesh load_mesh(std::string_view text, MeshFormat format,
                      MeshReport* report) {
  SurfaceMesh mesh = format == MeshFormat::Off ? parse_off(text) : parse_stl(text);
  MeshReport r = validate_mesh(mesh);
  if (report != nullptr) *report = std::move(r);
  return mesh;
}

SurfaceMesh load_mesh_file(const std::string& path, MeshReport* report) {
  const std::string ext = lowercase_extension(path);
  MeshFormat format;
  if (ext == "off") {
    format = MeshFormat::Off;
  } else if (ext == "stl") {
    format = MeshFormat::Stl;
  } else {
    throw Error(ErrorKind::Input,
                "unknown mesh format for '" + path + "' (expected .off or .stl)");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "failed reading '" + path + "'");
  return load_mesh(buffer.str(), format, report);
}

std::string to_off(const SurfaceMesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "OFF\n"
      << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  for (const auto& v : mesh.vertices) {
    out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const auto& t : mesh.triangles) {
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  return out.str();
}

void write_off_file(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << to_off(mesh);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace plasmon

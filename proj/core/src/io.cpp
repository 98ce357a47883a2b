#include "wfpl/io.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "wfpl/error.hpp"

namespace wfpl {
namespace {

constexpr std::array<char, 8> kMagic = {'W', 'F', 'P', 'L', 'K', 'E', 'R', 'N'};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("kernel blob truncated");
  return v;
}

std::vector<double> faces(const Grid& g) {
  std::vector<double> f;
  f.reserve(g.size() + 1);
  for (const Cell& c : g.cells()) f.push_back(c.lower);
  if (g.size()) f.push_back(g.cells().back().upper);
  return f;
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  std::filesystem::path s = path;
  s += ".json";
  return s;
}

}  // namespace

void save_kernel(const KernelMatrix& K, const std::filesystem::path& path) {
  const Grid& g = *K.grid;
  const std::uint64_t n = K.size();
  const std::uint8_t with_tail =
      std::any_of(K.tail_weights.begin(), K.tail_weights.end(), [](double t) { return t != 0.0; }) ? 1 : 0;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write kernel blob " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put(os, kKernelFormatVersion);
  put(os, g.spec().hash());
  put(os, n);
  put(os, static_cast<std::int32_t>(K.quadrature_order));
  put(os, K.kernel_order);
  put(os, K.truncation_error_bound);
  put(os, with_tail);
  for (double f : faces(g)) put(os, f);
  os.write(reinterpret_cast<const char*>(K.pair_weights.data()),
           static_cast<std::streamsize>(K.pair_weights.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(K.tail_weights.data()),
           static_cast<std::streamsize>(K.tail_weights.size() * sizeof(double)));
  if (!os) throw ConfigError("failed writing kernel blob " + path.string());

  nlohmann::ordered_json j;
  j["format_version"] = kKernelFormatVersion;
  j["spec_hash"] = g.spec().hash();
  j["spec"] = g.spec().describe();
  j["n_cells"] = n;
  j["quadrature_order"] = K.quadrature_order;
  j["kernel_order"] = K.kernel_order;
  j["with_tail"] = with_tail == 1;
  j["truncation_error_bound"] = K.truncation_error_bound;
  write_text_file(sidecar(path), j.dump(2) + "\n");
}

KernelMatrix load_kernel(const std::filesystem::path& path, const GridPtr& grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open kernel blob " + path.string());
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw ConfigError("not a kernel blob: " + path.string());
  if (get<std::uint32_t>(is) != kKernelFormatVersion) throw ConfigError("unsupported kernel blob version");
  if (get<std::uint64_t>(is) != grid->spec().hash()) throw ConfigError("kernel blob was assembled for another spec");
  const auto n = get<std::uint64_t>(is);
  if (n != grid->size()) throw ConfigError("kernel blob cell count differs from the grid");
  KernelMatrix K;
  K.grid = grid;
  K.quadrature_order = get<std::int32_t>(is);
  K.kernel_order = get<double>(is);
  K.truncation_error_bound = get<double>(is);
  get<std::uint8_t>(is);
  for (double f : faces(*grid))
    if (get<double>(is) != f) throw ConfigError("kernel blob cell faces differ from the grid");
  K.pair_weights.resize(n * n);
  K.tail_weights.resize(n);
  if (!is.read(reinterpret_cast<char*>(K.pair_weights.data()), static_cast<std::streamsize>(n * n * sizeof(double))) ||
      !is.read(reinterpret_cast<char*>(K.tail_weights.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw ConfigError("kernel blob truncated");
  return K;
}

KernelMatrix cached_kernel(const std::filesystem::path& path, const GridPtr& grid, const KernelOptions& options) {
  const double order = options.order < 0.0 ? grid->spec().ps() : options.order;
  if (std::filesystem::exists(path)) {
    try {
      KernelMatrix K = load_kernel(path, grid);
      const bool has_tail =
          std::any_of(K.tail_weights.begin(), K.tail_weights.end(), [](double t) { return t != 0.0; });
      if (K.quadrature_order == options.quadrature_order && K.kernel_order == order && has_tail == options.with_tail)
        return K;
    } catch (const ConfigError&) {
    }
  }
  KernelMatrix K = assemble_kernel(grid, options);
  save_kernel(K, path);
  return K;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + path.string());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw ConfigError("failed writing " + path.string());
}

}  // namespace wfpl

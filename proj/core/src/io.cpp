#include "riseg/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "riseg/errors.hpp"

namespace riseg::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return in;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error(ErrorCode::Io, "truncated binary file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

// Reads "P5 W H MAXVAL" allowing comments, then the single whitespace byte.
void read_pgm_header(std::istream& in, int& width, int& height, int& maxval) {
  auto token = [&]() {
    std::string t;
    char ch;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(ch);
    }
    return t;
  };
  if (token() != "P5") throw Error(ErrorCode::Io, "not a binary PGM");
  width = std::stoi(token());
  height = std::stoi(token());
  maxval = std::stoi(token());
}

}  // namespace

json scene_to_json(const SceneState& scene) {
  json bodies = json::array();
  for (const auto& b : scene.bodies) {
    json verts = json::array();
    for (const auto& v : b.polygon) verts.push_back({v.x(), v.y()});
    bodies.push_back({{"id", b.id}, {"vertices", verts}, {"pose", {{"theta", b.pose.theta}, {"x", b.pose.x}, {"y", b.pose.y}}}});
  }
  const auto& ws = scene.workspace;
  return {{"workspace", {{"x_min", ws.x_min}, {"y_min", ws.y_min}, {"x_max", ws.x_max}, {"y_max", ws.y_max}}},
          {"pixel_pitch", scene.pixel_pitch},
          {"image_size", {scene.height, scene.width}},
          {"bodies", bodies}};
}

SceneState scene_from_json(const json& j) {
  try {
    SceneState s;
    const auto& ws = j.at("workspace");
    s.workspace = {ws.at("x_min").get<double>(), ws.at("y_min").get<double>(), ws.at("x_max").get<double>(),
                   ws.at("y_max").get<double>()};
    s.pixel_pitch = j.at("pixel_pitch").get<double>();
    s.height = j.at("image_size").at(0).get<int>();
    s.width = j.at("image_size").at(1).get<int>();
    for (const auto& jb : j.at("bodies")) {
      RigidBody b;
      b.id = jb.at("id").get<int>();
      for (const auto& v : jb.at("vertices")) b.polygon.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      const auto& p = jb.at("pose");
      b.pose = {p.at("theta").get<double>(), p.at("x").get<double>(), p.at("y").get<double>()};
      s.bodies.push_back(std::move(b));
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("scene document: ") + e.what());
  }
}

void write_scene(const fs::path& path, const SceneState& scene) { write_text(path, scene_to_json(scene).dump(2) + "\n"); }

SceneState read_scene(const fs::path& path) {
  try {
    return scene_from_json(json::parse(read_text(path)));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void write_pgm(const fs::path& path, const LabelMask& mask) {
  auto out = open_out(path);
  out << "P5\n" << mask.cols() << " " << mask.rows() << "\n65535\n";
  for (Label l : mask.data()) {
    const char bytes[2] = {static_cast<char>(l >> 8), static_cast<char>(l & 0xff)};
    out.write(bytes, 2);
  }
}

void write_pgm(const fs::path& path, const UncertaintyMap& map) {
  auto out = open_out(path);
  out << "P5\n" << map.cols() << " " << map.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(map.data().data()), static_cast<std::streamsize>(map.size()));
}

LabelMask read_label_pgm(const fs::path& path) {
  auto in = open_in(path);
  int w, h, maxval;
  read_pgm_header(in, w, h, maxval);
  LabelMask mask(h, w, 0);
  for (auto& l : mask.data()) {
    if (maxval > 255) {
      unsigned char b[2];
      if (!in.read(reinterpret_cast<char*>(b), 2)) throw Error(ErrorCode::Io, "truncated PGM");
      l = static_cast<Label>((b[0] << 8) | b[1]);
    } else {
      unsigned char b;
      if (!in.read(reinterpret_cast<char*>(&b), 1)) throw Error(ErrorCode::Io, "truncated PGM");
      l = b;
    }
  }
  return mask;
}

UncertaintyMap read_uncertainty_pgm(const fs::path& path) {
  auto in = open_in(path);
  int w, h, maxval;
  read_pgm_header(in, w, h, maxval);
  if (maxval > 255) throw Error(ErrorCode::Io, "uncertainty map must be 8-bit");
  UncertaintyMap map(h, w, 0);
  if (!in.read(reinterpret_cast<char*>(map.data().data()), static_cast<std::streamsize>(map.size())))
    throw Error(ErrorCode::Io, "truncated PGM");
  return map;
}

void write_flow(const fs::path& path, const FlowField& flow) {
  auto out = open_out(path);
  out.write("RISFLOW1", 8);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(flow.rows()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(flow.cols()));
  for (int r = 0; r < flow.rows(); ++r) {
    for (int c = 0; c < flow.cols(); ++c) {
      put_le<float>(out, static_cast<float>(flow.du(r, c)));
      put_le<float>(out, static_cast<float>(flow.dv(r, c)));
    }
  }
}

FlowField read_flow(const fs::path& path) {
  auto in = open_in(path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, "RISFLOW1", 8) != 0) throw Error(ErrorCode::Io, "bad flow magic");
  const auto h = get_le<std::uint32_t>(in);
  const auto w = get_le<std::uint32_t>(in);
  FlowField flow(static_cast<int>(h), static_cast<int>(w));
  for (int r = 0; r < flow.rows(); ++r) {
    for (int c = 0; c < flow.cols(); ++c) {
      flow.du(r, c) = get_le<float>(in);
      flow.dv(r, c) = get_le<float>(in);
    }
  }
  return flow;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace riseg::io

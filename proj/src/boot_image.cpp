// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/boot_image.hpp"

#include <algorithm>
#include <string>

#include "nvtwin/errors.hpp"

namespace nvtwin {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void s16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
  void s8(std::int8_t v) { u8(static_cast<std::uint8_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8(const char* what) {
    need(1, what);
    return in_[pos_++];
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    const auto v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::int16_t s16(const char* what) { return static_cast<std::int16_t>(u16(what)); }
  std::int8_t s8(const char* what) { return static_cast<std::int8_t>(u8(what)); }

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) {
      throw BootImageError("truncated boot image: " + std::string(what) + " at byte " +
                           std::to_string(pos_) + " needs " + std::to_string(n) + " byte(s)");
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_{0};
};

}  // namespace

std::vector<std::uint8_t> encode_boot_image(const BootImage& image) {
  std::vector<const NodeProgram*> order;
  order.reserve(image.programs.size());
  for (const auto& p : image.programs) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });

  if (order.size() > 0xFFFF) throw BootImageError("more than 65535 nodes in one boot image");
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->id == order[i - 1]->id) {
      throw BootImageError("node " + std::to_string(order[i]->id.index()) + " appears twice");
    }
  }

  Writer w;
  for (auto b : kBootMagic) w.u8(b);
  w.u16(kBootVersion);
  w.u16(image.chip_index);
  w.u16(static_cast<std::uint16_t>(order.size()));
  for (const NodeProgram* p : order) {
    if (p->table.size() > kMaxFanIn) {
      throw BootImageError("node " + std::to_string(p->id.index()) + " has " +
                           std::to_string(p->table.size()) + " table entries");
    }
    if (p->table.has_duplicate_sources()) {
      throw BootImageError("node " + std::to_string(p->id.index()) + " lists a source twice");
    }
    w.u16(p->id.value);
    w.u8(static_cast<std::uint8_t>(p->opcode));
    w.u8(p->is_output ? 0x01 : 0x00);
    w.s16(p->param);
    w.u16(static_cast<std::uint16_t>(p->table.size()));
    for (const auto& e : p->table.entries()) {
      w.u16(e.source.value);
      w.s8(e.weight);
    }
  }
  return w.take();
}

std::vector<std::vector<std::uint8_t>> encode_boot_images(std::span<const NodeProgram> programs,
                                                          std::span<const ChipBridge> plan) {
  std::vector<BootImage> images(plan.size());
  for (std::size_t c = 0; c < plan.size(); ++c) {
    images[c].chip_index = static_cast<std::uint16_t>(plan[c].chip_index);
  }
  for (const auto& p : programs) {
    const auto it = std::find_if(plan.begin(), plan.end(), [&](const ChipBridge& c) { return c.contains(p.id); });
    if (it == plan.end()) {
      throw BootImageError("node " + std::to_string(p.id.index()) + " is outside every chip range");
    }
    images[static_cast<std::size_t>(it - plan.begin())].programs.push_back(p);
  }
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(encode_boot_image(img));
  return out;
}

BootImage decode_boot_image(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (std::size_t i = 0; i < kBootMagic.size(); ++i) {
    if (r.u8("magic") != kBootMagic[i]) throw BootImageError("bad magic: not an NV1B boot image");
  }
  const auto version = r.u16("version");
  if (version != kBootVersion) {
    throw BootImageError("unsupported boot image version " + std::to_string(version));
  }

  BootImage image;
  image.chip_index = r.u16("chip_index");
  const auto count = r.u16("node_count");
  image.programs.reserve(count);

  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t at = r.offset();
    NodeProgram p;
    p.id = NodeId(r.u16("node id"));
    if (!image.programs.empty() && !(image.programs.back().id < p.id)) {
      throw BootImageError("node ids not strictly ascending at byte " + std::to_string(at));
    }
    const auto raw_op = r.u8("opcode");
    const auto op = opcode_from_byte(raw_op);
    if (!op) throw BootImageError("unknown opcode " + std::to_string(raw_op) + " at byte " + std::to_string(at + 2));
    p.opcode = *op;
    const auto flags = r.u8("flags");
    if (flags & ~0x01u) throw BootImageError("reserved flag bits set at byte " + std::to_string(at + 3));
    p.is_output = (flags & 0x01u) != 0;
    p.param = r.s16("param");
    const auto table_len = r.u16("table_len");
    if (table_len > kMaxFanIn) {
      throw BootImageError("table_len " + std::to_string(table_len) + " exceeds 256 at byte " +
                           std::to_string(at + 6));
    }
    if (r.remaining() < static_cast<std::size_t>(table_len) * 3) {
      throw BootImageError("truncated boot image: table of node " + std::to_string(p.id.index()));
    }
    std::vector<ConnectionEntry> entries;
    entries.reserve(table_len);
    for (std::size_t k = 0; k < table_len; ++k) {
      const NodeId src(r.u16("source"));
      const Weight w = r.s8("weight");
      if (!entries.empty() && !(entries.back().source < src)) {
        throw BootImageError("table sources not strictly ascending for node " + std::to_string(p.id.index()));
      }
      entries.push_back({src, w});
    }
    p.table = AddressTable(std::move(entries));
    image.programs.push_back(std::move(p));
  }
  if (r.remaining() != 0) {
    throw BootImageError(std::to_string(r.remaining()) + " trailing byte(s) after the last node");
  }
  return image;
}

bool looks_like_boot_image(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= kBootMagic.size() && std::equal(kBootMagic.begin(), kBootMagic.end(), bytes.begin());
}

}  // namespace nvtwin

#include "ocrx/message.hpp"

#include <sstream>

#include "ocrx/errors.hpp"

namespace ocrx {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::CreateObject: return "CreateObject";
    case MessageKind::AddDependence: return "AddDependence";
    case MessageKind::Satisfy: return "Satisfy";
    case MessageKind::MapResolution: return "MapResolution";
    case MessageKind::MapGet: return "MapGet";
    case MessageKind::AcquireRequest: return "AcquireRequest";
    case MessageKind::AcquireGrant: return "AcquireGrant";
    case MessageKind::ReleaseNotice: return "ReleaseNotice";
    case MessageKind::DestroyObject: return "DestroyObject";
    case MessageKind::CopyData: return "CopyData";
    case MessageKind::FileOp: return "FileOp";
  }
  return "?";
}

std::string_view to_string(AccessMode mode) {
  switch (mode) {
    case AccessMode::Default: return "DEFAULT";
    case AccessMode::Null: return "NULL";
    case AccessMode::RO: return "RO";
    case AccessMode::Const: return "CONST";
    case AccessMode::RW: return "RW";
    case AccessMode::EW: return "EW";
  }
  return "?";
}

std::string copy_type_name(CopyType t) {
  if (t.has(props::kCopyPartition)) return "PARTITION";
  if (t.has(props::kCopyPartitionBack)) return "PARTITION_BACK";
  return "PLAIN";
}

MessageKind kind_of(const Payload& p) {
  return static_cast<MessageKind>(p.index());
}

bool has_local_reference(const Payload& p) {
  bool found = false;
  for_each_reference(p, [&](const Identifier& id) { found = found || id.is_local(); });
  return found;
}

namespace {

NodeIndex home_of(const Identifier& id) {
  if (!id.is_global()) {
    fail(ErrorKind::InvalidId, "cannot route a message to " + format(id));
  }
  return id.global().node;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string join_ids(const std::vector<Identifier>& ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ",";
    out += format(ids[i]);
  }
  return out + "]";
}

std::string join_u64(const std::vector<std::uint64_t>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

}  // namespace

NodeIndex route(const Payload& p) {
  return std::visit(
      Overloaded{
          [](const CreateObject& m) {
            return std::visit(Overloaded{
                                  [](const CreateTaskSpec& s) { return s.home; },
                                  [](const CreateEventSpec& s) { return s.home; },
                                  [](const CreateMapSpec& s) { return s.home; },
                                  [](const CreatePartitionsSpec& s) { return home_of(s.block); },
                                  [](const CreateChunkSpec& s) { return home_of(s.file); },
                              },
                              m.spec);
          },
          [](const AddDependence& m) {
            return m.register_sink ? home_of(m.source) : home_of(m.dest);
          },
          [](const Satisfy& m) { return home_of(m.dest); },
          [](const MapResolution& m) { return m.reply_to; },
          [](const MapGet& m) { return home_of(m.map); },
          [](const AcquireRequest& m) { return m.block.node; },
          [](const AcquireGrant& m) { return m.task.node; },
          [](const ReleaseNotice& m) { return home_of(m.block); },
          [](const DestroyObject& m) { return home_of(m.target); },
          [](const CopyData& m) { return home_of(m.dest); },
          [](const FileOp& m) { return home_of(m.file); },
      },
      p);
}

std::string summarize(const Payload& p) {
  std::ostringstream os;
  std::visit(
      Overloaded{
          [&](const CreateObject& m) {
            std::visit(
                Overloaded{
                    [&](const CreateTaskSpec& s) {
                      os << "Task lid=" << format(s.task_lid) << " template=" << s.info.name
                         << " params=" << join_u64(s.params) << " deps=" << join_ids(s.deps);
                      if (s.event_lid) os << " event=" << format(*s.event_lid);
                    },
                    [&](const CreateEventSpec& s) { os << "Event lid=" << format(s.lid); },
                    [&](const CreateMapSpec& s) {
                      os << "Map lid=" << format(s.lid) << " size=" << s.size
                         << " creator=" << s.creator;
                    },
                    [&](const CreatePartitionsSpec& s) {
                      os << "Partitions block=" << format(s.block) << " count=" << s.ranges.size();
                      for (const auto& l : s.lids) os << " " << format(l);
                    },
                    [&](const CreateChunkSpec& s) {
                      os << "Chunk file=" << format(s.file) << " offset=" << s.offset
                         << " size=" << s.size << " lid=" << format(s.lid);
                    },
                },
                m.spec);
          },
          [&](const AddDependence& m) {
            os << (m.register_sink ? "register " : "") << "src=" << format(m.source)
               << " dst=" << format(m.dest) << " slot=" << m.slot
               << " mode=" << to_string(m.mode);
          },
          [&](const Satisfy& m) {
            os << "dst=" << format(m.dest) << " slot=" << m.slot
               << " payload=" << format(m.payload);
          },
          [&](const MapResolution& m) { os << format(m.lid) << " -> " << format(m.guid); },
          [&](const MapGet& m) {
            os << "map=" << format(m.map) << " index=" << m.index << " lid=" << format(m.lid);
          },
          [&](const AcquireRequest& m) {
            os << "block=" << format(m.block) << " task=" << format(m.task) << " slot=" << m.slot
               << " mode=" << to_string(m.mode);
          },
          [&](const AcquireGrant& m) {
            os << "block=" << format(m.block) << " task=" << format(m.task) << " slot=" << m.slot;
            if (m.open_failed) os << " open-failed";
          },
          [&](const ReleaseNotice& m) {
            os << "block=" << format(m.block) << " holder=" << format(m.holder);
          },
          [&](const DestroyObject& m) { os << "target=" << format(m.target); },
          [&](const CopyData& m) {
            os << "dst=" << format(m.dest) << "@" << m.dest_offset << " src=" << format(m.source)
               << "@" << m.source_offset << " size=" << m.size
               << " type=" << copy_type_name(m.type);
          },
          [&](const FileOp& m) {
            os << (m.op == FileOp::Op::Open ? "open" : "release") << " file=" << format(m.file);
          },
      },
      p);
  return os.str();
}

}  // namespace ocrx

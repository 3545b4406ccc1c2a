#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scanseg/core/types.hpp"

namespace scanseg {

inline constexpr const char* kEventCsvHeader =
    "event,start_frame,start_t_ms,end_frame,end_t_ms,x_start,y_start,x_end,y_end,model_id,gt_id,category,"
    "amplitude_dva,angle_deg";
inline constexpr const char* kTraceCsvHeader = "frame,t_ms,x,y";

// Numbers are written in shortest round-trip form; absent IDs, and the
// fields that do not apply to an event kind, are empty.
std::string events_to_csv(const std::vector<GazeEvent>& events);
std::vector<GazeEvent> events_from_csv(const std::string& text);

std::string trace_to_csv(const std::vector<GazePoint>& trace);
std::vector<GazePoint> trace_from_csv(const std::string& text);

struct RecordFiles {
    std::filesystem::path events;
    std::filesystem::path trace;
    std::filesystem::path meta;
};

// <dir>/<video_id>_s<seed>{.csv,_trace.csv,.json}
RecordFiles record_files(const std::filesystem::path& dir, const std::string& video_id, std::uint64_t seed);

// Writes all three files. `meta_json` is merged into the metadata object
// (video_id and seed are always present).
void save_record(const std::filesystem::path& dir, const ScanpathRecord& rec, const std::string& meta_json = "{}");

// Loads an events CSV plus, when present, its trace and metadata siblings.
// Without metadata the video ID is the file stem up to the last "_s" and
// the seed is 0.
ScanpathRecord load_record(const std::filesystem::path& events_csv);

// All records (events CSVs, trace files excluded) in a directory, sorted by
// file name.
std::vector<ScanpathRecord> load_record_dir(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

}  // namespace scanseg

#pragma once

#include <filesystem>
#include <string>

#include "laban/evaluation.hpp"
#include "laban/guidance.hpp"
#include "laban/model.hpp"
#include "laban/synthetic.hpp"

namespace laban {

// Write-temp-then-rename so partially written files never replace outputs.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Motion JSON: {"fps": .., "joint_names": [..], "frames": [[[x,y,z], ..], ..]}.
// Numbers round-trip exactly.
std::string motion_to_json(const Motion& motion);
Motion motion_from_json(const std::string& text, const std::string& context = "motion");
void save_motion(const std::filesystem::path& path, const Motion& motion);
Motion load_motion(const std::filesystem::path& path);

void save_series_csv(const std::filesystem::path& path, const LabanSeries& series);

void save_loss_csv(const std::filesystem::path& path, const std::vector<LossSample>& trajectory);

// Line-delimited dataset records plus a sidecar <path>.meta.json describing
// skeleton and condition buckets.
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

void save_change_matrix_csv(const std::filesystem::path& path, const ChangeMatrix& matrix);
std::string change_matrix_report_json(const ChangeMatrix& matrix, GuidanceMethod method,
                                      const EvalConfig& cfg, std::size_t n_conditions);

}  // namespace laban

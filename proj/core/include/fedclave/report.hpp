#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "fedclave/experiment.hpp"

namespace fedclave {

enum class ReportFormat { kCsv, kMarkdown, kSvg };

ReportFormat parse_report_format(std::string_view name);  // throws ConfigError("format")
std::string_view report_extension(ReportFormat format);    // csv | md | svg

inline constexpr std::string_view kCsvHeader =
    "exp_type,dataset,scenario,seed,accuracy_mean,accuracy_std,ARI,AMI,hom,cmplt,vm";

// Two-decimal fixed formatting; "-0.00" is normalized to "0.00".
std::string format_score(double value);

void write_csv(std::ostream& out, std::span<const ExperimentResult> results);
void write_markdown(std::ostream& out, std::span<const ExperimentResult> results);
// Line chart of accuracy_mean against the effective k of each result.
void write_svg(std::ostream& out, std::span<const ExperimentResult> results);

// Throws Error{kEmptyInput} for no results and Error{kIoError} when the
// file cannot be written.
void write_report(std::span<const ExperimentResult> results, const std::filesystem::path& path,
                  ReportFormat format);

// Round-by-round training log rows: round,mean_train_loss,test_accuracy.
inline constexpr std::string_view kRoundLogHeader = "round,mean_train_loss,test_accuracy";

}  // namespace fedclave

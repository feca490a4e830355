#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace deployopt {

enum class Scheduler { torque, slurm };

std::string_view to_string(Scheduler s);
/// Throws UnsupportedSchedulerError for anything but torque or slurm.
Scheduler parse_scheduler(std::string_view text);

/// Job duration rendered as hh:mm:ss.
class Walltime {
public:
    Walltime() = default;
    explicit Walltime(std::chrono::seconds s) : seconds_(s) {}

    /// Accepts `hh:mm:ss` with mm, ss < 60; nullopt otherwise.
    static std::optional<Walltime> parse(std::string_view text);

    std::chrono::seconds duration() const noexcept { return seconds_; }
    std::string str() const;

    friend bool operator==(const Walltime&, const Walltime&) = default;

private:
    std::chrono::seconds seconds_{3600};
};

struct JobSpec {
    Scheduler scheduler = Scheduler::torque;
    std::string job_name;
    std::string image_uri;
    std::string workload_command;
    bool gpu = false;
    Walltime walltime;
    bool exclusive = true;
    /// Processors per node requested from Torque for an exclusive job.
    unsigned cores_per_node = 20;
};

/// Throws PreconditionError unless the spec can be rendered: non-empty
/// single-line name, image, and command, positive walltime.
void validate(const JobSpec& spec);

/// `singularity exec [--nv] <image> <command>`.
std::string container_command(const JobSpec& spec);

/// Shebang, one directive block, and the container command.
std::string render_script(const JobSpec& spec);

}  // namespace deployopt

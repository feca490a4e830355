#include "deployopt/jobs.hpp"

#include <charconv>
#include <cstdio>

#include "deployopt/error.hpp"
#include "deployopt/types.hpp"

namespace deployopt {

std::string_view to_string(Scheduler s) { return s == Scheduler::slurm ? "slurm" : "torque"; }

Scheduler parse_scheduler(std::string_view text) {
    const std::string t = ascii_lower(text);
    if (t == "torque") return Scheduler::torque;
    if (t == "slurm") return Scheduler::slurm;
    throw UnsupportedSchedulerError(std::string(text));
}

std::optional<Walltime> Walltime::parse(std::string_view text) {
    long parts[3] = {0, 0, 0};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        const auto colon = text.find(':', pos);
        if ((i < 2) == (colon == std::string_view::npos)) return std::nullopt;
        const auto field = text.substr(pos, i < 2 ? colon - pos : std::string_view::npos);
        const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[i]);
        if (field.empty() || ec != std::errc{} || end != field.data() + field.size() || parts[i] < 0) {
            return std::nullopt;
        }
        pos = colon + 1;
    }
    if (parts[1] >= 60 || parts[2] >= 60) return std::nullopt;
    return Walltime(std::chrono::seconds(parts[0] * 3600 + parts[1] * 60 + parts[2]));
}

std::string Walltime::str() const {
    const long total = static_cast<long>(seconds_.count());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02ld:%02ld:%02ld", total / 3600, (total / 60) % 60, total % 60);
    return buf;
}

void validate(const JobSpec& spec) {
    const auto single_line = [](std::string_view field, const std::string& value) {
        if (value.empty()) throw PreconditionError(std::string(field) + " must be non-empty");
        if (value.find_first_of("\r\n") != std::string::npos) {
            throw PreconditionError(std::string(field) + " must be a single line");
        }
    };
    single_line("job_name", spec.job_name);
    if (spec.job_name.find_first_of(" \t") != std::string::npos) {
        throw PreconditionError("job_name must not contain whitespace");
    }
    single_line("image_uri", spec.image_uri);
    single_line("workload_command", spec.workload_command);
    if (spec.walltime.duration().count() <= 0) throw PreconditionError("walltime must be positive");
    if (spec.cores_per_node == 0) throw PreconditionError("cores_per_node must be positive");
}

std::string container_command(const JobSpec& spec) {
    validate(spec);
    std::string cmd = "singularity exec ";
    if (spec.gpu) cmd += "--nv ";
    return cmd + spec.image_uri + " " + spec.workload_command;
}

std::string render_script(const JobSpec& spec) {
    const std::string exec_line = container_command(spec);
    std::string s = "#!/bin/bash\n";
    switch (spec.scheduler) {
        case Scheduler::torque: {
            const unsigned ppn = spec.exclusive ? spec.cores_per_node : 1;
            s += "#PBS -N " + spec.job_name + "\n";
            s += "#PBS -l nodes=1:ppn=" + std::to_string(ppn) + (spec.gpu ? ":gpus=1" : "") + "\n";
            s += "#PBS -l walltime=" + spec.walltime.str() + "\n";
            s += "\ncd \"${PBS_O_WORKDIR}\"\n";
            break;
        }
        case Scheduler::slurm:
            s += "#SBATCH --job-name=" + spec.job_name + "\n";
            s += "#SBATCH --nodes=1\n";
            if (spec.exclusive) s += "#SBATCH --exclusive\n";
            if (spec.gpu) s += "#SBATCH --gres=gpu:1\n";
            s += "#SBATCH --time=" + spec.walltime.str() + "\n";
            s += "\n";
            break;
    }
    return s + exec_line + "\n";
}

}  // namespace deployopt

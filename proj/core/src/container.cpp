#include "deployopt/container.hpp"

#include <algorithm>

#include "deployopt/error.hpp"

namespace deployopt {

std::string_view to_string(BaseKind b) { return b == BaseKind::gpu_base ? "gpu_base" : "cpu_base"; }
std::string_view to_string(InstallMethod m) { return m == InstallMethod::source ? "source" : "pip"; }

const std::vector<std::string>& gpu_environment_names() {
    static const std::vector<std::string> names = {"CUDA_HOME", "CUDNN_INSTALL_PATH", "LD_LIBRARY_PATH", "PATH"};
    return names;
}

namespace {

constexpr std::string_view kPip = "python3 -m pip install";

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

std::string pip(std::string_view args) { return std::string(kPip) + " " + std::string(args); }

std::string pip_package(Framework fw, const Version& v, Target target) {
    const bool gpu = target == Target::gpu;
    std::string name;
    switch (fw) {
        case Framework::tensorflow: name = gpu ? "tensorflow-gpu" : "tensorflow"; break;
        case Framework::pytorch: name = "torch"; break;
        case Framework::mxnet: name = gpu ? "mxnet-cu101" : "mxnet"; break;
        case Framework::cntk: name = gpu ? "cntk-gpu" : "cntk"; break;
    }
    return name + "==" + v.str() + ".*";
}

std::string framework_dependencies(Framework fw) {
    switch (fw) {
        case Framework::tensorflow: return pip("numpy six wheel mock h5py keras_applications keras_preprocessing");
        case Framework::pytorch: return pip("numpy pyyaml setuptools cffi typing ninja");
        case Framework::mxnet: return pip("numpy requests graphviz");
        case Framework::cntk: return pip("numpy scipy");
    }
    return {};
}

// Release tags are three-part ("v1.4.0") even when the catalog pins "1.4".
std::string release_tag(const Version& v) {
    return v.segments().size() == 2 ? "v" + v.str() + ".0" : "v" + v.str();
}

// Bazel release each TensorFlow branch was built and tested with.
std::string bazel_version_for(const Version& v) {
    if (v.segments().size() >= 2 && v.segments()[0] == 1 && v.segments()[1] == 14) return "0.24.1";
    if (v.segments().size() >= 2 && v.segments()[0] == 2 && v.segments()[1] <= 1) return "0.29.1";
    return {};
}

void base_packages(BuildRecipe& r) {
    r.post_commands.push_back("export DEBIAN_FRONTEND=noninteractive");
    r.post_commands.push_back("apt-get update");
    if (r.base == BaseKind::cpu_base) {
        r.post_commands.push_back(
            "apt-get install -y --no-install-recommends llvm-8 clang-8 python3 python3-dev python3-pip git wget "
            "ca-certificates");
    } else {
        r.post_commands.push_back(
            "apt-get install -y --no-install-recommends python3 python3-dev python3-pip git wget ca-certificates");
    }
    r.post_commands.push_back(pip("--upgrade pip setuptools wheel"));
}

void tensorflow_from_source(BuildRecipe& r, const ImageSpec& image, const BuilderConfig& config) {
    const bool gpu = image.target == Target::gpu;
    const std::string dir = config.install_prefix + "/tensorflow";
    for (const auto& flag : config.cpu_flags) r.build_flags.push_back("--copt=" + flag);

    auto& post = r.post_commands;
    post.push_back(framework_dependencies(Framework::tensorflow));
    post.push_back(
        "wget -q -O /usr/local/bin/bazel "
        "https://github.com/bazelbuild/bazelisk/releases/download/v1.7.4/bazelisk-linux-amd64");
    post.push_back("chmod +x /usr/local/bin/bazel");
    if (const auto bazel = bazel_version_for(image.version); !bazel.empty()) {
        post.push_back("export USE_BAZEL_VERSION=" + bazel);
    }
    post.push_back("git clone --depth 1 --branch r" + image.version.str() +
                   " https://github.com/tensorflow/tensorflow.git " + dir);
    post.push_back("cd " + dir);
    post.push_back("export PYTHON_BIN_PATH=/usr/bin/python3");
    post.push_back(std::string("export TF_ENABLE_XLA=") + (image.capabilities.contains(Compiler::xla) ? "1" : "0"));
    if (gpu) {
        post.insert(post.end(), config.tensorflow_gpu_commands.begin(), config.tensorflow_gpu_commands.end());
    } else {
        post.push_back("export TF_NEED_CUDA=0");
    }
    post.push_back("yes '' | ./configure");
    post.push_back(std::string("bazel build --config=opt ") + (gpu ? "--config=cuda " : "") + join(r.build_flags, " ") +
                   (r.build_flags.empty() ? "" : " ") + "//tensorflow/tools/pip_package:build_pip_package");
    post.push_back("./bazel-bin/tensorflow/tools/pip_package/build_pip_package /tmp/tensorflow_pkg");
    post.push_back(pip("/tmp/tensorflow_pkg/tensorflow-*.whl"));
    if (image.capabilities.contains(Compiler::ngraph)) {
        post.push_back("git clone --depth 1 https://github.com/tensorflow/ngraph-bridge.git " + config.install_prefix +
                       "/ngraph-bridge");
        post.push_back("cd " + config.install_prefix + "/ngraph-bridge");
        post.push_back("python3 build_ngtf.py --use_tensorflow_from_location " + dir);
        post.push_back(pip("build_cmake/artifacts/ngraph_tensorflow_bridge-*.whl"));
    }
    post.push_back("cd / && rm -rf " + dir + " /root/.cache/bazel /tmp/tensorflow_pkg");
}

void pytorch_from_source(BuildRecipe& r, const ImageSpec& image, const BuilderConfig& config) {
    const bool gpu = image.target == Target::gpu;
    const std::string dir = config.install_prefix + "/pytorch";
    r.build_flags = config.cpu_flags;
    const std::string flags = join(r.build_flags, " ");

    auto& post = r.post_commands;
    post.push_back(framework_dependencies(Framework::pytorch));
    post.push_back("git clone --depth 1 --recursive --branch " + release_tag(image.version) +
                   " https://github.com/pytorch/pytorch.git " + dir);
    post.push_back("cd " + dir);
    post.push_back(std::string("export USE_CUDA=") + (gpu ? "1" : "0"));
    if (!flags.empty()) {
        post.push_back("export CFLAGS=\"" + flags + "\"");
        post.push_back("export CXXFLAGS=\"" + flags + "\"");
    }
    post.push_back("python3 setup.py install");
    if (image.capabilities.contains(Compiler::glow)) {
        const std::string glow = config.install_prefix + "/glow";
        post.push_back(
            "apt-get install -y --no-install-recommends cmake ninja-build libpng-dev libgoogle-glog-dev "
            "libprotobuf-dev protobuf-compiler");
        post.push_back("git clone --recursive https://github.com/pytorch/glow.git " + glow);
        post.push_back("mkdir -p " + glow + "/build && cd " + glow + "/build");
        post.push_back(
            "cmake -G Ninja -DCMAKE_BUILD_TYPE=Release -DCMAKE_C_COMPILER=clang-8 -DCMAKE_CXX_COMPILER=clang++-8 "
            "-DLLVM_DIR=/usr/lib/llvm-8/lib/cmake/llvm" +
            (flags.empty() ? std::string() : " -DCMAKE_CXX_FLAGS=\"" + flags + "\"") + " ..");
        post.push_back("ninja all");
        post.push_back("cd " + glow + "/torch_glow && python3 setup.py install");
    }
    post.push_back("cd / && rm -rf " + dir);
}

void check_consistent(const ResolvedImage& resolved, const OptimisationRequest& request) {
    const ImageSpec& image = resolved.image;
    const std::string tag = tag_of(image);
    if (image.source == Source::hub) {
        throw InconsistentResolutionError("'" + tag + "' is a hub image; it is pulled, not built");
    }
    if (!request.ai_training) throw InconsistentResolutionError("request has no ai_training block");
    const auto& fo = *request.ai_training;
    if (fo.framework != image.framework || fo.version != image.version) {
        throw InconsistentResolutionError("'" + tag + "' does not provide the requested " +
                                          std::string(to_string(fo.framework)) + " " + fo.version.str());
    }
    if (image.target != request.target()) {
        throw InconsistentResolutionError("'" + tag + "' targets " + std::string(to_string(image.target)) +
                                          " but the request targets " + std::string(to_string(request.target())));
    }
    if (resolved.enabled_compilers != fo.compilers) {
        throw InconsistentResolutionError("enabled compilers of '" + tag + "' differ from the request");
    }
    for (Compiler c : resolved.enabled_compilers) {
        if (!image.capabilities.contains(c)) {
            throw InconsistentResolutionError("'" + tag + "' lacks " + std::string(to_string(c)));
        }
    }
    if (image.source == Source::src && !request.enable_opt_build) {
        throw InconsistentResolutionError("'" + tag + "' is an opt-build image but enable_opt_build is false");
    }
}

}  // namespace

BuildRecipe make_recipe(const ResolvedImage& resolved, const OptimisationRequest& request,
                        const BuilderConfig& config) {
    check_consistent(resolved, request);
    const ImageSpec& image = resolved.image;
    const std::string tag = tag_of(image);

    BuildRecipe r;
    r.bootstrap = config.bootstrap;
    r.framework = image.framework;
    r.version = image.version;
    r.environment = {{"LC_ALL", "C.UTF-8"}, {"LANG", "C.UTF-8"}};
    if (image.target == Target::gpu) {
        r.base = BaseKind::gpu_base;
        r.base_ref = config.gpu_base_ref;
        r.environment.insert(r.environment.end(), {
                                                      {"CUDA_HOME", "/usr/local/cuda"},
                                                      {"CUDNN_INSTALL_PATH", "/usr/lib/x86_64-linux-gnu"},
                                                      {"PATH", "/usr/local/cuda/bin:$PATH"},
                                                      {"LD_LIBRARY_PATH",
                                                       "/usr/local/cuda/lib64:/usr/local/cuda/extras/CUPTI/lib64:"
                                                       "$LD_LIBRARY_PATH"},
                                                  });
    } else {
        r.base = BaseKind::cpu_base;
        r.base_ref = config.cpu_base_ref;
    }
    base_packages(r);

    if (image.source == Source::pip) {
        if (image.capabilities.contains(Compiler::glow)) {
            throw InconsistentResolutionError("'" + tag + "': glow is only available as a source build");
        }
        r.install_method = InstallMethod::pip;
        r.post_commands.push_back(framework_dependencies(image.framework));
        r.post_commands.push_back(pip(pip_package(image.framework, image.version, image.target)));
        if (image.capabilities.contains(Compiler::ngraph)) r.post_commands.push_back(pip("ngraph-tensorflow-bridge"));
        return r;
    }

    r.install_method = InstallMethod::source;
    switch (image.framework) {
        case Framework::tensorflow: tensorflow_from_source(r, image, config); break;
        case Framework::pytorch: pytorch_from_source(r, image, config); break;
        case Framework::mxnet:
        case Framework::cntk:
            throw InconsistentResolutionError("no source build recipe for " + std::string(to_string(image.framework)));
    }
    return r;
}

std::vector<std::string> validate_recipe(const BuildRecipe& r) {
    std::vector<std::string> out;
    if (r.bootstrap.empty() || r.base_ref.empty()) out.push_back("bootstrap and base reference must be non-empty");
    for (const auto& [name, value] : r.environment) {
        if (name.empty() || name.find_first_of("= \t\n") != std::string::npos) {
            out.push_back("invalid environment name '" + name + "'");
        }
        if (value.find('\n') != std::string::npos) out.push_back("environment value of " + name + " spans lines");
    }
    for (const auto& cmd : r.post_commands) {
        if (cmd.empty() || cmd.find('\n') != std::string::npos) {
            out.push_back("post commands must be single non-empty lines");
            break;
        }
    }
    if (r.base == BaseKind::gpu_base) {
        for (const auto& name : gpu_environment_names()) {
            const bool present = std::any_of(r.environment.begin(), r.environment.end(),
                                             [&](const EnvVar& e) { return e.first == name; });
            if (!present) out.push_back("gpu base recipe lacks " + name);
        }
    }
    if (r.install_method == InstallMethod::source && r.post_commands.empty()) {
        out.push_back("source builds need post commands");
    }
    return out;
}

DefinitionFile render_definition(const BuildRecipe& recipe) {
    if (const auto problems = validate_recipe(recipe); !problems.empty()) {
        throw PreconditionError("invalid build recipe: " + problems.front());
    }
    DefinitionFile def;
    def.sections = {
        {"header", {"Bootstrap: " + recipe.bootstrap, "From: " + recipe.base_ref}},
        {"environment", {}},
        {"post", recipe.post_commands},
    };
    for (const auto& [name, value] : recipe.environment) {
        def.sections[1].lines.push_back("export " + name + "=" + value);
    }

    std::string& t = def.text;
    for (const auto& line : def.sections[0].lines) t += line + "\n";
    t += "\n%environment\n";
    for (const auto& line : def.sections[1].lines) t += "    " + line + "\n";
    t += "\n%post\n";
    for (const auto& line : def.sections[2].lines) t += "    " + line + "\n";
    return def;
}

std::vector<DefinitionSection> scan_definition(std::string_view text) {
    const auto fail = [](const std::string& what) { throw FormatError("DEFINITION_FORMAT", what); };
    std::vector<DefinitionSection> sections{{"header", {}}};
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        if (line.starts_with("%")) {
            const std::string name(line.substr(1));
            const std::string expected = sections.size() == 1 ? "environment" : "post";
            if (sections.size() > 2 || name != expected) fail("unexpected section '%" + name + "'");
            sections.push_back({name, {}});
            continue;
        }
        if (sections.size() > 1) {
            if (!line.starts_with("    ")) fail("section body lines must be indented by four spaces");
            line.remove_prefix(4);
        }
        sections.back().lines.emplace_back(line);
    }
    if (sections.size() != 3) fail("definition must contain %environment and %post exactly once");
    return sections;
}

std::vector<EnvVar> scan_environment(const DefinitionSection& section) {
    std::vector<EnvVar> out;
    for (std::string_view line : section.lines) {
        if (!line.starts_with("export ")) throw FormatError("DEFINITION_FORMAT", "expected 'export NAME=value'");
        line.remove_prefix(7);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw FormatError("DEFINITION_FORMAT", "expected 'export NAME=value'");
        }
        out.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }
    return out;
}

std::string build_command(std::string_view definition_path, std::string_view image_output_path, bool fakeroot) {
    if (definition_path.empty()) throw PreconditionError("definition path must be non-empty");
    if (image_output_path.empty()) throw PreconditionError("image output path must be non-empty");
    std::string cmd = "singularity build ";
    if (fakeroot) cmd += "--fakeroot ";
    cmd += std::string(image_output_path) + " " + std::string(definition_path);
    return cmd;
}

}  // namespace deployopt

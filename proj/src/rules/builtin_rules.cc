// Copyright 2026 The detml Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>
#include <utility>
#include <vector>

#include "detml/rules.h"

namespace detml {
namespace {

PathPattern Exact(std::string text) { return {MatchMode::kExact, std::move(text)}; }
PathPattern Prefix(std::string text) { return {MatchMode::kPrefix, std::move(text)}; }
PathPattern Suffix(std::string text) { return {MatchMode::kSuffix, std::move(text)}; }
PathPattern Glob(std::string text) { return {MatchMode::kGlob, std::move(text)}; }

Activation OnImport(std::vector<std::string> modules) {
  return {ActivationKind::kLibraryImported, std::move(modules)};
}

struct RuleSpec {
  const char* id;
  Library library;
  RuleKind kind;
  std::vector<PathPattern> patterns;
  std::optional<Literal> value;
  Severity severity;
  Activation activation;
  const char* message;
  const char* fix_hint;
  const char* anchor;
};

RuleCatalog Build() {
  const std::vector<std::string> kMlLibraries = {"torch", "tensorflow", "xgboost"};
  std::vector<RuleSpec> specs = {
      // General seeds.
      {"general-pythonhashseed", Library::kGeneral, RuleKind::kRequiredEnv,
       {Exact("env:PYTHONHASHSEED")}, std::nullopt, Severity::kError,
       OnImport(kMlLibraries),
       "PYTHONHASHSEED is never set; str/bytes hashing and set iteration order "
       "vary between interpreter runs.",
       "Add os.environ['PYTHONHASHSEED'] = str(SEED) before any other import "
       "side effects.",
       "os.environ['PYTHONHASHSEED'] = SEED"},
      {"general-random-seed", Library::kGeneral, RuleKind::kRequiredCall,
       {Exact("random.seed")}, std::nullopt, Severity::kError,
       OnImport({"random"}),
       "The standard library random module is imported but never seeded.",
       "Call random.seed(SEED).", "random.seed(SEED)"},
      {"general-numpy-seed", Library::kGeneral, RuleKind::kRequiredCall,
       {Exact("numpy.random.seed")}, std::nullopt, Severity::kError,
       OnImport({"numpy"}),
       "NumPy is imported but its global random generator is never seeded.",
       "Call np.random.seed(SEED).", "np.random.seed(SEED)"},

      // PyTorch.
      {"pytorch-manual-seed", Library::kPytorch, RuleKind::kRequiredCall,
       {Exact("torch.manual_seed")}, std::nullopt, Severity::kError,
       OnImport({"torch"}), "PyTorch is imported but torch.manual_seed is never called.",
       "Call torch.manual_seed(SEED); it seeds the CPU and all CUDA devices.",
       "torch.manual_seed(SEED)"},
      {"pytorch-cudnn-deterministic", Library::kPytorch, RuleKind::kRequiredAssign,
       {Exact("torch.backends.cudnn.deterministic")}, Literal{true},
       Severity::kError, OnImport({"torch"}),
       "cuDNN is not restricted to deterministic algorithms.",
       "Set torch.backends.cudnn.deterministic = True.",
       "torch.backends.cudnn.deterministic = True"},
      {"pytorch-cudnn-benchmark", Library::kPytorch, RuleKind::kRequiredAssign,
       {Exact("torch.backends.cudnn.benchmark")}, Literal{false},
       Severity::kError, OnImport({"torch"}),
       "cuDNN benchmark mode is not disabled; the auto-tuner may pick a "
       "different, non-deterministic algorithm on each run or machine.",
       "Set torch.backends.cudnn.benchmark = False.",
       "torch.backends.cudnn.benchmark = False"},
      {"pytorch-set-deterministic", Library::kPytorch, RuleKind::kRequiredCall,
       {Exact("torch.set_deterministic"), Exact("torch.use_deterministic_algorithms")},
       std::nullopt, Severity::kWarning, OnImport({"torch"}),
       "Deterministic algorithms are not enforced globally; PyTorch will not "
       "raise when a non-deterministic operation runs.",
       "Call torch.use_deterministic_algorithms(True) (torch.set_deterministic "
       "on PyTorch < 1.8).",
       "torch.set_deterministic(True)"},
      {"pytorch-forbidden-maxpool3d", Library::kPytorch, RuleKind::kForbiddenCall,
       {Prefix("torch.nn.MaxPool3d")}, std::nullopt, Severity::kError,
       OnImport({"torch"}),
       "torch.nn.MaxPool3d has no deterministic CUDA backward implementation.",
       "Down-sample with a stride-2 convolution instead of 3D max pooling.",
       "torch.nn.MaxPool3d"},
      {"pytorch-forbidden-convtranspose3d", Library::kPytorch,
       RuleKind::kForbiddenCall, {Prefix("torch.nn.ConvTranspose3d")}, std::nullopt,
       Severity::kError, OnImport({"torch"}),
       "torch.nn.ConvTranspose3d has no deterministic CUDA implementation.",
       "Up-sample with nearest-neighbour interpolation followed by a regular "
       "convolution.",
       "torch.nn.ConvTranspose3d operations"},

      // TensorFlow.
      {"tensorflow-random-seed", Library::kTensorflow, RuleKind::kRequiredCall,
       {Exact("tensorflow.random.set_seed")}, std::nullopt, Severity::kError,
       OnImport({"tensorflow"}),
       "TensorFlow is imported but the global seed is never set.",
       "Call tf.random.set_seed(SEED).", "tf.random.set_seed(SEED)"},
      {"tensorflow-deterministic-ops", Library::kTensorflow, RuleKind::kRequiredEnv,
       {Exact("env:TF_DETERMINISTIC_OPS")}, Literal{std::string("1")},
       Severity::kError, OnImport({"tensorflow"}),
       "TF_DETERMINISTIC_OPS is not set to '1'; GPU kernels may use "
       "non-deterministic atomic reductions.",
       "Add os.environ['TF_DETERMINISTIC_OPS'] = '1' before TensorFlow builds "
       "its first graph.",
       "os.environ['TF_DETERMINISTIC_OPS'] = '1'"},
      {"tensorflow-intra-op-threads", Library::kTensorflow, RuleKind::kRequiredAssign,
       {Suffix("intra_op_parallelism_threads")}, Literal{std::int64_t{1}},
       Severity::kWarning, OnImport({"tensorflow"}),
       "intra_op_parallelism_threads is not pinned to 1; multi-threaded CPU "
       "reductions can change summation order.",
       "Set session_config.intra_op_parallelism_threads = 1.",
       "session_config.intra_op_parallelism_threads = 1"},
      {"tensorflow-inter-op-threads", Library::kTensorflow, RuleKind::kRequiredAssign,
       {Suffix("inter_op_parallelism_threads")}, Literal{std::int64_t{1}},
       Severity::kWarning, OnImport({"tensorflow"}),
       "inter_op_parallelism_threads is not pinned to 1; independent ops may "
       "run in a different order between runs.",
       "Set session_config.inter_op_parallelism_threads = 1.",
       "session_config.inter_op_parallelism_threads = 1"},

      // XGBoost.
      {"xgboost-param-seed", Library::kXgboost, RuleKind::kRequiredKeywordArg,
       {Exact("dict#seed"), Glob("xgboost.*#seed"), Glob("xgboost.*#random_state")},
       std::nullopt, Severity::kError, OnImport({"xgboost"}),
       "No 'seed' is passed to XGBoost training parameters; row and column "
       "subsampling are unseeded.",
       "Add 'seed': SEED to the params mapping (or seed=/random_state= for the "
       "scikit-learn API). Deterministic GPU histograms need XGBoost >= 1.1.0.",
       "param = {'seed': SEED,"},
      {"xgboost-single-precision", Library::kXgboost, RuleKind::kAdvisoryPattern,
       {Suffix("single_precision_histogram")}, std::nullopt, Severity::kWarning,
       OnImport({"xgboost"}),
       "single_precision_histogram trades histogram precision for speed.",
       "Single-precision histograms are deterministic only on XGBoost >= 1.1.0 "
       "(hist/gpu_hist before 1.1.0 accumulate floating-point error "
       "non-deterministically); pin the version in the environment manifest.",
       "'single_precision_histogram': True}"},
      {"xgboost-forbidden-allreduce", Library::kXgboost, RuleKind::kForbiddenCall,
       {Glob("xgboost.rabit.allreduce*"), Glob("xgboost.collective.allreduce*"),
        Glob("rabit.allreduce*")},
       std::nullopt, Severity::kError, OnImport({"xgboost", "rabit"}),
       "Rabit allreduce has not been verified to run deterministically.",
       "Train on a single worker, or aggregate results in a fixed order on one "
       "process.",
       "XGBoost's allreduce operations were avoided"},

      // Multi-worker data distribution.
      {"dask-multi-gpu-warning", Library::kGeneral, RuleKind::kAdvisoryPattern,
       {Prefix("dask_cuda.LocalCUDACluster"), Glob("dask.dataframe.from_*"),
        Glob("dask.dataframe.read_*"), Prefix("dask.dataframe.DataFrame")},
       std::nullopt, Severity::kWarning, OnImport({"dask", "dask_cuda"}),
       "Distributing data over multiple Dask workers partitions it "
       "non-deterministically.",
       "Train on a single worker when bit-identical results are required.",
       "Data distribution for multiple worker instances with Dask is not "
       "deterministic"},
  };

  RuleCatalog catalog{std::string(kCatalogVersion)};
  for (RuleSpec& spec : specs) {
    Rule rule;
    rule.id = spec.id;
    rule.library = spec.library;
    rule.kind = spec.kind;
    rule.matcher.patterns = std::move(spec.patterns);
    rule.matcher.required_value = std::move(spec.value);
    rule.severity = spec.severity;
    rule.activation = std::move(spec.activation);
    rule.message = spec.message;
    rule.fix_hint = spec.fix_hint;
    rule.paper_anchor = spec.anchor;
    catalog.Put(std::move(rule));
  }
  return catalog;
}

}  // namespace

const RuleCatalog& BuiltinRules() {
  static const RuleCatalog* catalog = new RuleCatalog(Build());
  return *catalog;
}

std::vector<std::string> BuiltinRuleIds() {
  std::vector<std::string> ids;
  for (const auto& [id, rule] : BuiltinRules().rules()) ids.push_back(id);
  return ids;
}

}  // namespace detml

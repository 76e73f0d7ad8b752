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

#ifndef DETML_SCAFFOLD_EMBEDDED_TEMPLATES_H_
#define DETML_SCAFFOLD_EMBEDDED_TEMPLATES_H_

#include <cstddef>
#include <string_view>

namespace detml {

// One file of templates/, keyed by its path relative to that directory
// ("pytorch/template.cfg", "pytorch/files/train.py", ...). The definitions
// are generated at build time by cmake/EmbedTemplates.cmake.
struct EmbeddedFile {
  std::string_view path;
  std::string_view content;
};

extern const EmbeddedFile kEmbeddedTemplateFiles[];
extern const std::size_t kEmbeddedTemplateFileCount;

}  // namespace detml

#endif  // DETML_SCAFFOLD_EMBEDDED_TEMPLATES_H_

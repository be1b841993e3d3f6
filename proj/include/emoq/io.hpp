// Copyright 2026 The Emoq Authors
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

#ifndef EMOQ_IO_HPP_
#define EMOQ_IO_HPP_

#include <filesystem>
#include <vector>

#include "emoq/rvq.hpp"
#include "emoq/types.hpp"

namespace emoq {

// All binary formats are little-endian. Layouts:
//   EMBV: magic, version u16, dtype u8 (0 = float32), n_rows u64, dim u32,
//         then n_rows*dim float32.
//   RVQC: magic, version u16, n_stages u32, entries u32, dim u32,
//         regime u8, target u8 (255 = none), bias u8 (255 = none), seed u64,
//         then L*K*D float32 stage-major.
//   RVQI: magic, n_rows u64, n_stages u32, entries u32, then n_rows*L
//         indices at 1/2/4 bytes each depending on K.

// Writes the matrix only; pair with write_manifest for the utterances.
void write_embeddings(const EmbeddingSet& set,
                      const std::filesystem::path& vectors_path);
void write_embeddings(const EmbeddingSet& set,
                      const std::filesystem::path& vectors_path,
                      const std::filesystem::path& manifest_path);

// JSON-lines manifest, one utterance per line:
// {"uid", "label", "soft", "frames", "corpus"}.
void write_manifest(const EmbeddingSet& set,
                    const std::filesystem::path& manifest_path);

// Level is utterance when every frame range has a single row, frame
// otherwise; the taxonomy is the canonical one sized for the manifest.
EmbeddingSet read_embeddings(const std::filesystem::path& vectors_path,
                             const std::filesystem::path& manifest_path);

// Manifest alone; labels resolve against the canonical taxonomy.
std::pair<std::vector<Utterance>, Taxonomy> read_manifest(
    const std::filesystem::path& manifest_path);

// Raw matrix without a manifest (for inspection and import plumbing).
std::pair<int, std::vector<float>> read_embedding_matrix(
    const std::filesystem::path& vectors_path);

void write_codebook(const RvqStack& stack, const std::filesystem::path& path);
RvqStack read_codebook(const std::filesystem::path& path);

// Fixed-width code index storage: K <= 256 one byte, K <= 65536 two, else
// four. Decode trusts the header K, never file length.
int code_index_width(int entries);

void write_codes(const CodeSequence& codes, const std::filesystem::path& path);
CodeSequence read_codes(const std::filesystem::path& path);

}  // namespace emoq

#endif  // EMOQ_IO_HPP_

# Copyright 2026 The Emoq Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Emotion-aware residual vector quantization toolkit."""

from emoq._core import (
    CodeSequence,
    DataError,
    EmbeddingSet,
    Level,
    LinearProbe,
    RouterBank,
    RvqStack,
    ValidationError,
    build_bank,
    codebook_entropy,
    cosine_fidelity,
    encode,
    from_arrays,
    generate,
    js_divergence,
    load_probe,
    macro_f1,
    nominal_bitrate,
    normalized_entropy,
    pool_utterance,
    primary_recall,
    probe_predict,
    probe_train,
    read_codebook,
    read_codes,
    read_embeddings,
    reconstruct,
    route_batch,
    save_probe,
    stratify,
    top2_set_accuracy,
    train_rvq,
    write_codebook,
    write_codes,
    write_embeddings,
)

__version__ = "0.1.0"

__all__ = [
    "CodeSequence",
    "DataError",
    "EmbeddingSet",
    "Level",
    "LinearProbe",
    "RouterBank",
    "RvqStack",
    "ValidationError",
    "build_bank",
    "codebook_entropy",
    "cosine_fidelity",
    "encode",
    "from_arrays",
    "generate",
    "js_divergence",
    "load_probe",
    "macro_f1",
    "nominal_bitrate",
    "normalized_entropy",
    "pool_utterance",
    "primary_recall",
    "probe_predict",
    "probe_train",
    "read_codebook",
    "read_codes",
    "read_embeddings",
    "reconstruct",
    "route_batch",
    "save_probe",
    "stratify",
    "top2_set_accuracy",
    "train_rvq",
    "write_codebook",
    "write_codes",
    "write_embeddings",
    "__version__",
]

# Copyright 2026 The sgpu Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Label-frequency estimation, debiasing and relation-detection metrics."""

from ._sgpu import (
    DataError,
    average_precision,
    debias,
    dlfe,
    estimate,
    eval_sgg,
    recover_unbiased,
    roi_align,
    simulate,
    train_est,
    version,
)

__version__ = version()

__all__ = [
    "DataError",
    "average_precision",
    "debias",
    "dlfe",
    "estimate",
    "eval_sgg",
    "recover_unbiased",
    "roi_align",
    "simulate",
    "train_est",
    "version",
]

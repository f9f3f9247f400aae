// Copyright 2026 The spoofshap Authors
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

#ifndef SPOOFSHAP_SPOOFSHAP_HPP_
#define SPOOFSHAP_SPOOFSHAP_HPP_

#include "spoofshap/analysis/aggregate.hpp"
#include "spoofshap/analysis/cohort.hpp"
#include "spoofshap/analysis/dominance.hpp"
#include "spoofshap/analysis/histogram.hpp"
#include "spoofshap/analysis/prune.hpp"
#include "spoofshap/autodiff/gradcheck.hpp"
#include "spoofshap/autodiff/graph.hpp"
#include "spoofshap/autodiff/loss.hpp"
#include "spoofshap/autodiff/tensor.hpp"
#include "spoofshap/corpus/manifest.hpp"
#include "spoofshap/corpus/synth.hpp"
#include "spoofshap/corpus/wav.hpp"
#include "spoofshap/dsp/fft.hpp"
#include "spoofshap/dsp/spectrogram.hpp"
#include "spoofshap/dsp/vad.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/model/checkpoint.hpp"
#include "spoofshap/model/model.hpp"
#include "spoofshap/parallel.hpp"
#include "spoofshap/pipeline/config.hpp"
#include "spoofshap/pipeline/stages.hpp"
#include "spoofshap/random.hpp"
#include "spoofshap/shap/attribution.hpp"
#include "spoofshap/shap/dump.hpp"
#include "spoofshap/shap/estimators.hpp"
#include "spoofshap/shap/explain.hpp"
#include "spoofshap/train/adam.hpp"
#include "spoofshap/train/batching.hpp"
#include "spoofshap/train/eer.hpp"
#include "spoofshap/train/matched.hpp"
#include "spoofshap/train/trainer.hpp"
#include "spoofshap/viz/image.hpp"
#include "spoofshap/viz/render.hpp"

#endif  // SPOOFSHAP_SPOOFSHAP_HPP_

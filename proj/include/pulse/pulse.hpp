#pragma once

// Umbrella header: the whole library.

#include "pulse/errors.hpp"
#include "pulse/rng.hpp"
#include "pulse/waveform.hpp"
#include "pulse/npy.hpp"
#include "pulse/mask_csv.hpp"
#include "pulse/synth.hpp"
#include "pulse/missingness.hpp"
#include "pulse/fft.hpp"
#include "pulse/welch.hpp"
#include "pulse/peaks.hpp"
#include "pulse/ecg_screen.hpp"
#include "pulse/beats.hpp"
#include "pulse/imputers.hpp"
#include "pulse/eval.hpp"
#include "pulse/model/tensor.hpp"
#include "pulse/model/config.hpp"
#include "pulse/model/net.hpp"
#include "pulse/model/model.hpp"
#include "pulse/model/train.hpp"
#include "pulse/model/checkpoint.hpp"
#include "pulse/report.hpp"
#include "pulse/pipeline.hpp"

#pragma once

#include "scgan/adam.hpp"
#include "scgan/checkpoint.hpp"
#include "scgan/cli.hpp"
#include "scgan/common.hpp"
#include "scgan/config.hpp"
#include "scgan/corpus.hpp"
#include "scgan/discriminator.hpp"
#include "scgan/evaluation.hpp"
#include "scgan/generator.hpp"
#include "scgan/image.hpp"
#include "scgan/layers.hpp"
#include "scgan/losses.hpp"
#include "scgan/pipeline.hpp"
#include "scgan/presets.hpp"
#include "scgan/report.hpp"
#include "scgan/rng.hpp"
#include "scgan/schedule.hpp"
#include "scgan/synthesis.hpp"
#include "scgan/tensor.hpp"
#include "scgan/trainer.hpp"

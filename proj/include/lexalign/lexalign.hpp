#pragma once

#include "lexalign/alignment.hpp"
#include "lexalign/concept_dataset.hpp"
#include "lexalign/config.hpp"
#include "lexalign/embedding_store.hpp"
#include "lexalign/evaluation.hpp"
#include "lexalign/retrieval.hpp"
#include "lexalign/svd.hpp"

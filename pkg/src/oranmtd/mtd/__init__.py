from ._ensemble import (DEFAULT_CLIP_RATIOS, DEFAULT_HIDDEN_SIZES, DEFAULT_LEARNING_RATES, Ensemble,
                        EnsembleConfig, EnsembleEvaluation, PruneStatus, default_ensemble_config,
                        draw_poisoned_index, ensemble_act, evaluate_ensemble, prune, select_model,
                        train_ensemble)

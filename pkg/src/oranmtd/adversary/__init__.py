from ._attack import (ATTACK_MODES, AttackSpec, PoisoningAttack, induced_reward, induced_step,
                      perturb_observation)

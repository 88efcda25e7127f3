from .ross_macdonald import (RossMacdonaldParams, ross_macdonald_params,
                             averaged_params,
                             DiseaseFreeSolution, disease_free_solution,
                             build_ross_macdonald, patch_ratios)
from .sis import build_sis_autonomous

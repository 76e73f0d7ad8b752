"""Seeds every random number generator and pins PyTorch to deterministic kernels.

Import this module before building models, data loaders or CUDA tensors.
"""
import os
import random

import numpy as np
import torch

SEED = {{ seed }}

os.environ['PYTHONHASHSEED'] = str(SEED)
random.seed(SEED)
np.random.seed(SEED)
torch.manual_seed(SEED)
torch.backends.cudnn.deterministic = True
torch.backends.cudnn.benchmark = False
torch.use_deterministic_algorithms(True)

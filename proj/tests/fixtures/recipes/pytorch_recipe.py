import numpy as np
import torch
import os
import random

os.environ['PYTHONHASHSEED'] = SEED
random.seed(SEED)
np.random.seed(SEED)
torch.manual_seed(SEED)
torch.backends.cudnn.deterministic = True
torch.backends.cudnn.benchmark = False
# torch.set_deterministic(True)

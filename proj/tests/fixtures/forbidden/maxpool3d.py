import numpy as np
import torch
import os
import random

SEED = 0
os.environ['PYTHONHASHSEED'] = str(SEED)
random.seed(SEED)
np.random.seed(SEED)
torch.manual_seed(SEED)
torch.backends.cudnn.deterministic = True
torch.backends.cudnn.benchmark = False
torch.use_deterministic_algorithms(True)


class Encoder(torch.nn.Module):
    def __init__(self):
        super().__init__()
        self.conv = torch.nn.Conv3d(1, 8, kernel_size=3, padding=1)
        self.pool = torch.nn.MaxPool3d(kernel_size=2)

    def forward(self, x):
        return self.pool(self.conv(x))

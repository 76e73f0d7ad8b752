"""Minimal training loop for {{ project_name }}."""
import argparse

import seed_setup  # noqa: F401  (must run before any other torch work)
import torch
from torch import nn


def parse_args():
    parser = argparse.ArgumentParser(description='Train {{ project_name }}.')
    parser.add_argument('--epochs', type=int, default=5)
    parser.add_argument('--lr', type=float, default=0.01)
    return parser.parse_args()


def main():
    args = parse_args()
    device = torch.device('cuda' if torch.cuda.is_available() else 'cpu')
    features = torch.randn(256, 16)
    target = features.sum(dim=1, keepdim=True)
    features, target = features.to(device), target.to(device)

    model = nn.Sequential(nn.Linear(16, 32), nn.ReLU(), nn.Linear(32, 1)).to(device)
    optimizer = torch.optim.SGD(model.parameters(), lr=args.lr)
    loss_fn = nn.MSELoss()
    for epoch in range(args.epochs):
        optimizer.zero_grad()
        loss = loss_fn(model(features), target)
        loss.backward()
        optimizer.step()
        print(f'epoch {epoch} loss {loss.item():.6f}')


if __name__ == '__main__':
    main()

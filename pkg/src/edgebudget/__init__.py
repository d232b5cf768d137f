"""Budgeted online edge purchasing on the random graph process.

A Builder watches the edges of K_n arrive in uniformly random order and
must decide, immediately and irrevocably, whether to purchase each one,
under caps on observations (t) and purchases (b).  This package provides
the edge stream, Builder strategies for connectivity, minimum degree,
Hamiltonicity, perfect matchings, trees and short cycles, brute-force
oracles for small instances, and a seeded Monte Carlo harness.
"""

from edgebudget.stream import EdgeStream, hitting_time
from edgebudget.graphstate import PurchasedGraph, BudgetLedger

__all__ = ["EdgeStream", "hitting_time", "PurchasedGraph", "BudgetLedger"]

"""Bipartite traveling tournament problem: models, bounds, exact search and constructions."""

from .model import CapacityError, Instance, Schedule, TeamItinerary, TravelReport, Venue, total_travel

__all__ = ["CapacityError", "Instance", "Schedule", "TeamItinerary", "TravelReport", "Venue", "total_travel"]

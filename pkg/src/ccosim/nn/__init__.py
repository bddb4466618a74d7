"""Desk-scale network bench for the oscillator-neuron activation."""

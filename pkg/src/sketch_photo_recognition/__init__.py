"""
Sketch-photo recognition

Bidirectional photo/sketch synthesis that shapes a shared latent space, with
an AdaCos identity head, trained in three steps and evaluated by cross-modal
identification.
"""

__version__ = "1.0.0"

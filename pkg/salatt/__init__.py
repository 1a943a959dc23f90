"""Saliency pre-selection and element-wise attention for visual question answering."""

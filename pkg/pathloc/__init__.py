"""Leavitt path algebras, their regular algebras and the graph monoid, over a tree of fields."""

# Makes the rmst_screen package importable when pytest runs from the repo root.

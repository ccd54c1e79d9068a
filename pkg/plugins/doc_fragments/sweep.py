class ModuleDocFragment(object):
    DOCUMENTATION = r"""
      options:
        max_sweep:
          description: |
            largest number of mu support patterns the possibilistic preparation check may enumerate.
            a scenario with |Y| sources and |I| instances has (2^|I| - 1)^|Y| patterns.
            when unset, E(CONTEXTURE_MAX_SWEEP) is used, then 6561.
          type: int
          ini:
            - section: contexture
              key: max_sweep
          env:
            - name: CONTEXTURE_MAX_SWEEP
    """

{
 "d_in": 2,
 "d_out": 2,
 "param": "phase",
 "param_value": 0.0,
 "kraus": [
  [
   [
    [
     0.14956815023065423,
     0.0
    ],
    [
     0.0,
     0.0
    ]
   ],
   [
    [
     0.0,
     0.0
    ],
    [
     -0.15809597397464545,
     0.0
    ]
   ]
  ],
  [
   [
    [
     0.0,
     0.0
    ],
    [
     0.3162277660168379,
     0.0
    ]
   ],
   [
    [
     0.0,
     0.0
    ],
    [
     0.0,
     0.0
    ]
   ]
  ],
  [
   [
    [
     -0.9887514189302489,
     0.0
    ],
    [
     0.0,
     0.0
    ]
   ],
   [
    [
     0.0,
     0.0
    ],
    [
     -0.9354173736963667,
     0.0
    ]
   ]
  ]
 ],
 "dkraus": [
  [
   [
    [
     0.0,
     0.0747840751150155
    ],
    [
     0.0,
     0.0
    ]
   ],
   [
    [
     0.0,
     0.0
    ],
    [
     0.0,
     0.07904798698699336
    ]
   ]
  ],
  [
   [
    [
     0.0,
     0.0
    ],
    [
     0.0,
     -0.1581138830077601
    ]
   ],
   [
    [
     0.0,
     0.0
    ],
    [
     0.0,
     0.0
    ]
   ]
  ],
  [
   [
    [
     0.0,
     -0.4943757094630644
    ],
    [
     0.0,
     0.0
    ]
   ],
   [
    [
     0.0,
     0.0
    ],
    [
     0.0,
     0.46770868684623446
    ]
   ]
  ]
 ]
}

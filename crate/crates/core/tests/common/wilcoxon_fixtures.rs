// Reference p-values from scipy.stats.wilcoxon (alternative='less').
// APPROX: zero_method='pratt', correction=True, method='approx'.
// EXACT: method='exact' on tie-free samples.

pub const APPROX: &[(&[f64], f64)] = &[
    (&[-0.039, 0.021, 0.029, 0.002, 0.014, 0.069, 0.086, 0.018, -0.069, -0.077, -0.006, 0.052, 0.042, 0.012, 0.028, 0.065, 0.047, -0.033, -0.088, -0.047, 0.042, 0.079, 0.043, 0.007, 0.023, 0.044, 0.005, -0.065, -0.074, 0.005, 0.086, 0.085, 0.023, -0.011, 0.01, 0.021, -0.023, -0.066, -0.032, 0.06], 0.9127268499095962),
    (&[0.064, 0.083, 0.027, -0.019, -0.007, 0.013, -0.02, -0.071, -0.058, 0.03, 0.097, 0.069, -0.01, -0.045, -0.018, 0.001, -0.03, -0.056, -0.01, 0.074, 0.097, 0.027, -0.054, -0.061, -0.014, 0.005, -0.022, -0.026, 0.032, 0.091, 0.065, -0.028, -0.085, -0.053, 0.009, 0.02, -0.006, 0.002, 0.055, 0.077], 0.7206351747009393),
    (&[0.069, -0.016, -0.091, -0.077, -0.012, 0.014, -0.01, -0.016, 0.032, 0.068, 0.024, -0.069, -0.105, -0.049, 0.023, 0.033, -0.001, -0.003, 0.035, 0.04, -0.028, -0.101, -0.088, -0.002, 0.059, 0.038, -0.007, -0.006, 0.021, 0.002, -0.067, -0.101, -0.043, 0.05, 0.075, 0.022, -0.029, -0.02, 0.002, -0.027], 0.20230217023650404),
    (&[-0.03, -0.081, -0.043, 0.052, 0.099, 0.057, -0.002, -0.006, 0.02, 0.005, -0.048, -0.06, 0.012, 0.095, 0.097, 0.022, -0.034, -0.02, 0.011, -0.007, -0.042, -0.02, 0.062, 0.111, 0.063, -0.026, -0.058, -0.018, 0.016, -0.002, -0.02, 0.021, 0.09, 0.092, 0.009, -0.068, -0.06, 0.004, 0.034, 0.012], 0.7681190805540536),
    (&[-0.03, -0.004, 0.067, 0.09, 0.022, -0.067, -0.081, -0.021, 0.023, 0.009, -0.009, 0.025, 0.073, 0.054, -0.034, -0.096, -0.062, 0.017, 0.048, 0.019, 0.002, 0.033, 0.055, 0.006, -0.076, -0.093, -0.018, 0.06, 0.061, 0.013, -0.004, 0.024, 0.025, -0.036, -0.089, -0.057, 0.037, 0.089, 0.051, -0.01], 0.6999442559963487),
    (&[-0.015, 0.007, 0.019, -0.029, -0.093, -0.083, 0.006, 0.076, 0.056, -0.01, -0.033, -0.007, -0.005, -0.052, -0.085, -0.035, 0.057, 0.087, 0.026, -0.045, -0.05, -0.015, -0.016, -0.054, -0.054, 0.017, 0.086, 0.066, -0.024, -0.079, -0.054, -0.009, -0.012, -0.038, -0.017, 0.053, 0.081, 0.017, -0.074, -0.093], 0.09385048447230826),
    (&[-0.045, 0.004, 0.014, -0.014, -0.007, 0.057, 0.102, 0.058, -0.037, -0.078, -0.031, 0.028, 0.029, 0.003, 0.02, 0.073, 0.079, 0.003, -0.077, -0.071, 0.007, 0.059, 0.041, 0.011, 0.03, 0.064, 0.037, -0.045, -0.088, -0.035, 0.055, 0.081, 0.037, 0.005, 0.024, 0.04, -0.004, -0.07, -0.066, 0.021], 0.8618912474704882),
    (&[0.027, 0.073, 0.04, -0.003, 0.006, 0.03, -0.0, -0.068, -0.086, -0.012, 0.074, 0.081, 0.018, -0.024, -0.008, 0.01, -0.026, -0.072, -0.046, 0.043, 0.099, 0.06, -0.02, -0.048, -0.016, -0.0, -0.032, -0.051, 0.003, 0.082, 0.091, 0.013, -0.062, -0.058, -0.009, 0.005, -0.021, -0.02, 0.043, 0.092], 0.6640212672341774),
    (&[0.088, 0.024, -0.061, -0.077, -0.029, -0.002, -0.025, -0.035, 0.015, 0.077, 0.06, -0.031, -0.096, -0.071, -0.004, 0.016, -0.01, -0.01, 0.037, 0.065, 0.009, -0.081, -0.104, -0.038, 0.032, 0.033, -0.003, -0.001, 0.036, 0.031, -0.041, -0.105, -0.078, 0.013, 0.063, 0.033, -0.011, -0.007, 0.02, -0.006], 0.2615772305811784),
    (&[-0.001, -0.076, -0.073, 0.011, 0.08, 0.065, 0.016, 0.008, 0.035, 0.025, -0.039, -0.079, -0.029, 0.065, 0.099, 0.049, -0.009, -0.008, 0.019, -0.001, -0.052, -0.052, 0.026, 0.103, 0.09, 0.009, -0.039, -0.018, 0.01, -0.009, -0.04, -0.009, 0.072, 0.109, 0.05, -0.037, -0.058, -0.013, 0.018, -0.002], 0.7742295741856179),
    (&[-0.046, -0.033, 0.045, 0.1, 0.06, -0.032, -0.072, -0.036, 0.006, -0.005, -0.026, 0.006, 0.074, 0.084, 0.007, -0.076, -0.077, -0.011, 0.028, 0.009, -0.007, 0.031, 0.073, 0.042, -0.048, -0.098, -0.052, 0.028, 0.05, 0.017, 0.002, 0.036, 0.051, -0.007, -0.084, -0.085, -0.004, 0.068, 0.058, 0.008], 0.6341195361931644),
    (&[-0.009, 0.016, 0.042, 0.001, -0.08, -0.105, -0.035, 0.048, 0.058, 0.008, -0.017, 0.006, 0.015, -0.039, -0.095, -0.072, 0.021, 0.081, 0.049, -0.017, -0.035, -0.008, -0.01, -0.058, -0.081, -0.021, 0.067, 0.084, 0.013, -0.053, -0.05, -0.014, -0.019, -0.055, -0.046, 0.03, 0.088, 0.055, -0.037, -0.082], 0.13811417629531614),
];

pub const EXACT: &[(&[f64], f64)] = &[
    (&[0.02573022109339329, -0.2321048632913019, 0.5404226504432821, 0.004900117153039701, -0.6356693731611109, 0.26159505490948476], 0.65625),
    (&[0.345584192064786, 0.8216181435011584, 0.33043707618338714, -1.303157231604361, 0.9053558666731177, 0.4463745723640113, -0.5369532353602852, 0.5811181041963531], 0.80859375),
    (&[0.28905338179353307, -0.4227484414807474, -0.31306354339189346, -2.3414673826398555, 1.8997073827209021, 1.2441658720372288, -0.22542283686782436, 0.8738065867276614, 0.3812106697976493, -0.4538228364240524], 0.615234375),
    (&[1.9409191213851824, -2.655665031314182, 0.3180988467257788, -0.6677696061279298, -0.5526492921104459, -0.31559716308976593, -2.119986129147251, -0.3319323776441895, -0.9652130762749417, 3.2229995166448826, 0.12578661322792176, -0.45263079434159537], 0.150634765625),
    (&[-0.6517911526116896, -0.17471729232577715, 1.6637239913911968, 0.659147749832255, -1.6413972945846467, -0.005203264171931977, -0.6234637409883934, 0.14863152325202633, -1.608187784186389, 0.2417718768768513, 0.23538091873745476, 1.5756260314314627, 0.3166450164719021, 0.5105466616976417, -1.4931166849642326], 0.532958984375),
    (&[-0.7019314252534474, -1.2243589956281449, -0.14836162209524853, 0.5204452380655215, 1.2360465324896428, 0.20970639932180818, -0.45264732053623247, -0.6847803553442784, 0.8487457707345911, 1.7347830429585775, 0.3727687758447218, -1.1333286640307716, -0.8582652054360888, 1.7000190889991116, 0.3028824405086084, -1.6321348424395847, 0.016303807182974195, -1.0632259734447485, -0.5292880940615545, -0.3880058232768574], 0.28529834747314453),
    (&[0.9531157544867582, 1.6764913038169929, -2.6532918384570134, -0.2379650613784081, 0.9137194090532766, 1.2521418253819911], 0.78125),
    (&[0.0012301533574825742, 0.2987455375084699, -0.2741378553622176, -0.8905918387572742, -0.45467078517172255, -0.9916465549964624, 0.060143602597438485, 1.3402152455545335], 0.37109375),
    (&[-1.638266398496882, -1.2366427931811323, -1.261106708564987, -0.2516171312784098, -2.212581579696703, -0.08889719608460778, -0.857229228096346, 0.9936001849299788, 1.056847237579234, 1.4922582291390867], 0.1611328125),
    (&[-0.9028369359828766, 0.14284990707900208, -1.7563454270422332, 0.556104877556666, 1.0434530226920893, -0.552611003007899, 0.3304857455543092, 0.15093256908418204, -0.4943520554588936, -0.9624048655156082, -2.132552427456725, 1.3104234840116702], 0.28466796875),
    (&[-1.103338449065532, -0.7250246402444398, -0.7818052573180567, 0.2669758563943925, -0.24858072943889084, 0.12648305151184983, 0.8430425708043379, 0.8579365494757685, 0.47518364194858514, -0.4507685980824168, -0.7549322818237513, -0.8148141073390911, -0.3438548577942607, -0.05138009378693365, -0.972273677374357], 0.114654541015625),
    (&[0.1341927672531842, 1.4597475403099618, 1.3247210785859325, -0.41030707678766754, -0.1979695111064471, -0.42738419303342523, 0.6697263575719601, 0.04393556095438241, 0.8468856162565439, -1.7473247989741094, 1.6665487746995207, 0.0035678398443794584, 0.7803784532741461, -0.036566333976827736, -0.27909856707485325, 0.5631101585975867, 0.924513527530113, -0.10252987069345151, -0.05278617857019707, 0.785698610809258], 0.9336366653442383),
];

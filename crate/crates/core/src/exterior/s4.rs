//! Static order data on S4, in one-line notation.

pub(crate) const S4_WEAK_EDGES: [(&str, &str); 36] = [
    ("1234", "2134"), ("1234", "1324"), ("1234", "1243"), ("1243", "2143"), ("1243", "1423"), ("1324", "3124"),
    ("1324", "1342"), ("1342", "3142"), ("1342", "1432"), ("1423", "4123"), ("1423", "1432"), ("1432", "4132"),
    ("2134", "2314"), ("2134", "2143"), ("2143", "2413"), ("2314", "3214"), ("2314", "2341"), ("2341", "3241"),
    ("2341", "2431"), ("2413", "4213"), ("2413", "2431"), ("2431", "4231"), ("3124", "3214"), ("3124", "3142"),
    ("3142", "3412"), ("3214", "3241"), ("3241", "3421"), ("3412", "4312"), ("3412", "3421"), ("3421", "4321"),
    ("4123", "4213"), ("4123", "4132"), ("4132", "4312"), ("4213", "4231"), ("4231", "4321"), ("4312", "4321"),
];

pub(crate) const S4_BRUHAT_EDGES: [(&str, &str); 58] = [
    ("1234", "2134"), ("1234", "1324"), ("1234", "1243"), ("1243", "2143"), ("1243", "1423"), ("1243", "1342"),
    ("1324", "3124"), ("1324", "2314"), ("1324", "1423"), ("1324", "1342"), ("1342", "3142"), ("1342", "2341"),
    ("1342", "1432"), ("1423", "4123"), ("1423", "2413"), ("1423", "1432"), ("1432", "4132"), ("1432", "3412"),
    ("1432", "2431"), ("2134", "3124"), ("2134", "2314"), ("2134", "2143"), ("2143", "4123"), ("2143", "3142"),
    ("2143", "2413"), ("2143", "2341"), ("2314", "3214"), ("2314", "2413"), ("2314", "2341"), ("2341", "3241"),
    ("2341", "2431"), ("2413", "4213"), ("2413", "3412"), ("2413", "2431"), ("2431", "4231"), ("2431", "3421"),
    ("3124", "4123"), ("3124", "3214"), ("3124", "3142"), ("3142", "4132"), ("3142", "3412"), ("3142", "3241"),
    ("3214", "4213"), ("3214", "3412"), ("3214", "3241"), ("3241", "4231"), ("3241", "3421"), ("3412", "4312"),
    ("3412", "3421"), ("3421", "4321"), ("4123", "4213"), ("4123", "4132"), ("4132", "4312"), ("4132", "4231"),
    ("4213", "4312"), ("4213", "4231"), ("4231", "4321"), ("4312", "4321"),
];


pub(crate) const B_FAMILIES: [[&str; 4]; 18] = [
    ["2314", "3241", "1423", "4132"],
    ["2431", "1342", "3124", "4213"],
    ["2134", "1243", "4312", "3421"],
    ["3214", "1432", "2341", "4123"],
    ["4231", "1324", "3142", "2413"],
    ["1234", "2143", "3412", "4321"],
    ["1234", "2134", "1243", "2143"],
    ["1324", "1342", "3142", "3124"],
    ["4231", "2431", "4213", "2413"],
    // Listed with a repeated member.
    ["3412", "4321", "4312", "3412"],
    ["1432", "1423", "4123", "4132"],
    ["3214", "2314", "3241", "2341"],
    ["2143", "3412", "3142", "2413"],
    ["3214", "3124", "4213", "4123"],
    ["2134", "2314", "4312", "4132"],
    ["1432", "2431", "1342", "2341"],
    ["1234", "4231", "1324", "4321"],
    ["1243", "3241", "3412", "1423"],
];

#pragma once

// Generated by tests/oracles/generate_oracles.py (scipy 1.15.3, scikit-learn 1.7.2, xgboost 3.2.0). Do not edit.

#include <vector>

namespace oracle {

inline const std::vector<double> kWelchA0 = {1.0, 2.0, 3.0, 4.0, 5.0};
inline const std::vector<double> kWelchB0 = {2.0, 3.0, 4.0, 5.0, 6.0};
inline constexpr double kWelchT0 = -1.0;
inline constexpr double kWelchDf0 = 8.0;
inline constexpr double kWelchP0 = 0.34659350708733416;
inline const std::vector<double> kWelchA1 = {80.1, 77.0, 91.5, 60.2, 85.0, 79.9, 88.8};
inline const std::vector<double> kWelchB1 = {83.3, 70.1, 95.0, 101.2, 66.6};
inline constexpr double kWelchT1 = -0.3702175205140735;
inline constexpr double kWelchDf1 = 6.611539106163904;
inline constexpr double kWelchP1 = 0.7227939809628839;
inline const std::vector<double> kWelchA2 = {83.0, 69.0, 65.0, 102.0, 77.0, 108.0, 83.0, 76.0, 100.0, 60.0, 42.0, 57.0, 60.0, 55.0, 85.0, 95.0, 83.0, 104.0, 79.0, 99.0, 104.0, 68.0, 83.0, 99.0, 68.0, 113.0, 92.0, 93.0, 89.0, 93.0, 60.0, 118.0, 50.0, 75.0, 67.0, 68.0, 93.0, 82.0, 93.0, 51.0, 82.0, 100.0, 118.0, 80.0, 46.0, 117.0, 67.0, 75.0, 54.0, 97.0, 100.0, 86.0, 71.0, 46.0, 101.0, 78.0, 110.0, 63.0, 85.0, 82.0};
inline const std::vector<double> kWelchB2 = {80.0, 127.0, 78.0, 98.0, 69.0, 98.0, 94.0, 55.0, 83.0, 68.0, 128.0, 85.0, 94.0, 115.0, 129.0, 98.0, 78.0, 103.0, 120.0, 67.0, 120.0, 85.0, 91.0, 131.0, 75.0, 59.0, 71.0, 49.0, 89.0, 112.0, 108.0, 117.0, 70.0, 86.0, 115.0, 109.0, 90.0, 81.0, 88.0, 53.0, 47.0, 145.0, 85.0, 95.0, 101.0};
inline constexpr double kWelchT2 = -2.3865448657362767;
inline constexpr double kWelchDf2 = 84.25744363447063;
inline constexpr double kWelchP2 = 0.0192471408452228;
inline const std::vector<double> kProbeX = {1.1857190502109414, -0.5329475592202763, 0.6289112778548936, 4.527559435585253, 7.468249105383485, -0.2597340846433556, 3.2451513952210247, -4.535455593056607, -0.23284099710418826, 2.2834703027776317, 4.453346843536185, 0.15420392140991926, 0.5836116014646349, 0.13277201008493167, -0.8001139187001703, 3.539389356982972, 2.2120075994069923, 0.4509792856079, 1.705236041048308, 5.492406331138812, 0.38275837968075593, 1.16065809732963, 5.482969314214333, -0.13433922652437053, 1.7446997386717378, 2.556445859659495, -0.7001507557571752, 2.688087222391532, 4.548293067684315, 1.0432074409835457, 0.927299877128515, -0.6936347745737956, -0.40851485268238524, 2.3047591209735083, 2.379122164981753, -0.7879994520752491, 1.312401766171288, 0.695174208678361, -1.1312920988498483, 3.9297389355404038, -1.5769222755876853, 0.7217667879705645, 2.7256515762549247, -9.392408031521594, -1.1390075800875412, 2.3796203532331193, 1.8697560796865993, 0.7108820705748276, 2.2343434091489294, 2.7956979795143706, -0.33346319759563836, 1.9748651968961917, -3.4026135355657177, 0.19051470122026723, 3.17831643620133, -1.6847351565017759, -0.5472541076375357, 2.280285036470376, -3.1318909775025423, -0.4017310589162791, 2.068385617486538, 3.146543841897654, -0.4936726557172615, 2.704278717298242, 3.716198953241525, 0.29808610839446237, 1.284851556319331, -5.282693480342126, 0.19121453840064892, 1.4811130883292616, -2.5079810994691325, 0.2953772920751846, 1.3213239247058177, 0.4838023449855211, -0.6779122277794629, 2.9411071816040426, 2.5120568882664522, 0.48591043002975887, 2.7904631757243807, -0.7190510856021839, -0.4960827596331423, 2.890591186932234, -2.44360528984547, 0.7389654085368785, 1.9267496954435173, -2.2502135194888226, -0.5699849955374032, 1.3408826372460583, 2.787142516980996, -0.18238833530665893, 1.8981897111902069, -3.232316938657687, 0.13212323738531756, 3.180389420517584, 2.35692120521995, 1.1670768654534496, 1.0308443488281829, -6.67501873892124, 0.20500200768008323, 2.035313786628832, -6.043007576896688, 0.8093326480387517, 3.1803368104185976, -0.5181310828851766, 0.05980254060317922, 4.039937217973075, 2.4673078647391504, 0.5227372992832463, 1.4071620578569866, 0.9071214736354376, -0.3779065331686014, 3.0864142806880634, 1.2142120581535454, 0.4692270812841495, 2.7050892038622636, 0.7507428504089915, -0.3040583245139102, 3.550010365851298, -11.25738743185734, 0.15005447752940265};
inline const std::vector<int> kProbeY = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
inline const std::vector<double> kLogisticW = {0.7165012616184722, 0.0908513450619728, 1.972599903177131};
inline constexpr double kLogisticB = -1.6057086711174091;
inline const std::vector<double> kWideX = {-0.4329722103669484, 0.11952198218526151, 0.08650462637248775, 2.027890333035012, 0.8758924869528549, -0.8077255104206768, -0.005065042366076056, -1.9747154684169488, 0.47009838194661313, -0.4918148588408563, -0.36864139629310483, -0.18704524846330722, -0.5342746465130491, 1.2106137935455767, 0.3492930019849466, -2.1048904141544127, 0.3595961705053289, -0.06002436094810488, -0.6240338581995171, -0.3210483439938125, 0.21943250911433013, -1.2803379719433579, -0.929495150206442, 1.8209456709193768, 1.886514411573434, 0.7627629618121969, -0.996572089382659, 1.275648285003655, 0.23731480751299083, -0.9943706285002066, 0.7520117975691236, 0.1130919970534902, 0.7065084775620522, 0.11992873774125401, -1.46419075985688, 1.6224863266354663, -0.899892356532552, -0.23810951249706314, 0.9928542364702315, 0.7886571996367419, -0.9542167578935526, -1.9850141532846133, 0.6516314179151286, -0.4413155896712503, 0.8177038674302639, -1.547543392721991, -0.16890448821666468, -0.12073607766926742, -0.0378256077224383, -0.13113849409916256, -0.5191891198647133, 0.3467858690348505, 0.4059975263777208, -1.3400407822991833, 1.2998787384720911, -0.38130020489636074, -0.7328535346657576, -0.3713723493159507, -1.2906176531698033, 0.07270471454697813, 0.6685311439571537, 0.513070508990249, 0.285011523511799, 0.31597561764518717, -2.0926785635472878, 1.3346201749956401, 1.2386148007923556, -1.304246971683189, 0.2439054633873692, -1.177578082004266, -0.4119305477280683, 0.15500776459729534, -0.04841820731009139, 0.4070122712386962, 0.9952366678669112, -1.2706394423024134, -0.674358874936643, 0.27481327464387917, -0.26061253932913825, -1.0823246893948497, 1.1698445032478917, 0.3445692085971314, 0.6489476555060814, 1.4309248278032072, -0.21483662023957859, 0.06842585429313358, 0.3248901645018589, 0.610494423415224, 0.2819635303302739, -0.11109222439328253, -1.4932528312963855, 0.26565161964495915, -1.4777712512422934, -1.4111342716994346, -0.02066438133862711, -0.5680418487936697, 0.4306800185842145, -0.25960595874342757, -0.5053452782638437, 1.081117763340367, 0.40633889802838413, 0.19150516193268657, -0.534916860760686, -0.34869649738275643, -0.15564205342335316, 0.9970402328712225, -0.07356528674800951, -0.4493563108754577, -0.32369331485034175, 1.0409855905932734, -0.35088715837715384, -0.3453749860806172, -1.9209529976928337, 1.8598386728894907, -1.550905005985137, 0.7317998245519551, 0.5082481097050112, -0.7028051698410228, 1.6642551160183328, 1.6569564942237744, 2.3346793842364866, 0.21724484180341658, 0.31597406964403896, 1.0859367270797504, -0.11104488652972916, 1.7884333412999809, 0.764868427895824, 1.5634204238175968, 1.3790793637078689, 0.3104465931806651, 1.062519505980101, -0.6181765446922844, 0.1457658136484906, -0.20665958692459216, -1.1104910486937587, -0.00681797282828154, 0.016755827488240328, 0.9649441387168272, -1.296053318045142, 1.7758238092674754, -0.19429365715663147, -0.7025967545551389, 1.257222654484642, 0.25547649312223486, 0.6396692632951472, -0.3122180420531111, 0.43419564438675, 1.2851072117295326, -0.7334467383302151, -0.04313869583903966, 0.9832243859568485, -1.1170137227944095, 2.1315779603873573, 0.40866521003551, -0.9773731365728371, 2.007137988202891, -1.2871444935735936, -0.15877626649696822, -0.026081535008787075, -1.6097027679449512, -0.18427144264454845, 0.2781595191341277, 0.1602977287213094, 0.12052631594980384, -0.48271196799201727, 0.8210183709435313, -1.917972671269711, -0.546723126317256, 0.8852846556305564, 0.672672008983321, 1.6063606790298124, -0.7724157327556536, 1.3314809436451707, 0.93278582275231, -0.024459268115499627, 0.3454428178374395, -0.06202092076552674, 0.8803869888854252, -1.0140369643708786, 0.35466187686131995, 0.15781551934465354, 1.9821661078376798, 0.22653643818540123, 0.21746716600164792, 0.188295395328772, 0.7958028937655359, 0.6443451683719933, -0.8467711581088243, -0.5272071240672382, 0.7670330737835399, -0.34747165393359086, 0.11787469410094432, 1.731366454307943, -0.22514894837549904, 0.4949308624376819, -0.9448016711416534, -0.2899324778626537, -0.6437614599348727, 0.8275282274935978, -2.0119152778406755, 0.18435859311157785, -1.2676949847541974, -0.5674848911691394, -0.22791252558923433, 1.2694249797865276, 1.0517126742534486, 0.16939639408289697, -0.46636526047912535, 1.6580489041989963, -0.040321357721568724, 0.8268832050978717, 0.2153446809540879, 0.850694183721032, -0.4523775731053639, 0.2276289332066338, -1.3486931234151907, 1.959633322711782, -0.6670327793030844, -0.01223767622950057, 0.7443327838949422, 0.3055798642728066, -1.2992563574555926, 0.24844967366071327, -0.049784463577398144, -1.1129315463324323, 1.8299135196815688, -0.3645794504233554, 0.3016257970486209, 0.1318038666266573, -0.4774567983868639, -0.9123977022811057, -0.3878951069260051, -0.3357022598976528, 0.08143313341141996, 0.19242154504829273, 0.15145378162467327, 1.0235357454554506, -0.45075947503966535, 0.35973475148174916, 1.554338567204933, 1.526370303352666, 0.3656621832637619, -0.7330930392566359, 1.9025746639086876, 0.6632397183388826, -0.7609342795158014, -0.09696015234419493, 1.26198527541384, -0.18291249722909703, 0.24403719311486893, 1.6652186146136245, 1.1368626869961929, 0.4923281865761468, -0.7663588010991197, -0.7708546597774524, 0.38480481867626243, 0.13153710942515437, -0.7408258416355058, -0.0948429000801019, -0.5975978166641449, 0.6438762351647418, -0.4666048929770636, -0.751760003822075, -1.1602055520582881, 1.7913657892018766, -0.621534714034887, 0.7035593546584866, -0.7714919958621814, -1.2079789643260528, -0.7150746728926858, 0.9605192878804508, 1.9642974990035351, -1.7095946357633436, 0.971670847049829, 0.28803755627514976, -0.14032334485138584, -0.43801678235594144, -0.8910480997613143, 0.5971853605931928, -0.371598384255191, 1.1293349371711732, -0.07433632986088955, 0.9892239747337765, -0.06829600496321712, 0.690819261227044, 0.8826360367802265, 0.9635538131135324, -0.3311901310779438, -2.2144926121782396, 0.8858583935292385, 1.8631993232881816, -1.5556711123740834, 1.5247131179257483, 1.8322625428032506, 0.2398245187299226, 0.5485466023353188, -1.7570956946918086, 1.5490001623234395, 0.7793624926391023, -0.5186363864109987, -0.16784581510900623, 0.9279793032161106, -0.3161105984459844, -0.5130240129371101, 0.5442710825169724, 0.27058776282416835, 1.5164091875096792, -1.582461191130328, 0.09009880769590743, -0.3878625767612107, 0.7286664443490214, 1.0187118298786617, 1.3077092228486304, -0.367560459530844, -0.9289653334710681, 1.8222089422885335, 1.2229111936155541, 1.123863101970373, 0.19104064117160816, -2.223719431821981, -0.006665778050113826, -0.10198061563396432, 1.1182684340056053, 0.16960391980391193, 1.5883805917264742, -1.7783881166059035, 0.5967653166690335, 0.8905349573582411, 0.7202444020503771, 0.9121465656369362, -0.2615089760670781, -1.6865132639499982, -1.7667843681022806, -1.6541537741505623, 0.2854907245208107, 0.4201402603240773, 0.569343759939152, 0.6704530998339765, -0.9986681569858201, 1.3653817043416374, 1.18114852842765, -0.9459949918126646, 1.6216842505294433, 1.6223055708625953, -1.040735389848746, -0.2302986679585005, -1.4289049003419556, -0.5485103050270335, 1.1964712647439568, -0.5450429547740047, -0.49546811528865586, -0.8544632878991849, -0.6431989867310449, 1.6248875403979055, 1.1366410224904844, 0.14556300707181577, 0.24478874559710087, 1.0079343124127094, 0.7750831277338347, 0.7386662789907873, 0.9822789379888985, 1.202251132632936, -0.9097969942593672, 1.0276284210361928, -0.4125323260813509, -0.43440963418602974, -1.9479690435854538, 0.8058901558146864, 1.8923415474633194, 1.0319089266705643, 0.20944765146795183, 0.9980539032227159, -1.2988191453791131, 0.8181361303346955, -0.9779975892170776, -0.7362006852894598, 0.49976282929614496, -0.3282200049652002, 0.8889594351458938, 0.24132537608820726, -1.153400602136827, 1.2029293945596233, -1.4064202398400796, 0.16472352271255666};
inline const std::vector<int> kWideY = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
inline const std::vector<double> kWideW = {0.23453491949426442, 0.04142060317051829, 0.030094813053824505, -0.05969778855599628, -0.11884719561974968, 0.0750114259033188, -0.13779923790728765, 0.06427181515316141, 0.04938737058396493, 0.24220877303883967, 0.013271443970946734, 0.07301806181121709, -0.07135558588335766, -0.11654617969203905, 0.12683326501145695, 0.29594816899074583, 0.11198007336741413, -0.12918302387182326, -0.03912554311037981, 0.06274505375188692, -0.22642723367042256, -0.010684074204497566, 0.07033082833251314, 0.050118181412113674};
inline constexpr double kWideB = -0.06317319304036886;
inline const std::vector<double> kSvcDecision = {-0.2551860397487563, 0.9801029225662686, -0.7611909486616616, 0.5106382822470997, -0.9999995812484893, 1.0925667218728274, 0.5194286485253965, 0.12613667666971717, -0.9999995221751029, 1.0000001715962854, -1.1285492851371854, -0.9935863197030229, -1.0000002027830293, 0.999999771492906, -0.9268358133100508, 0.9999999807635594, -0.6430736664781637, -0.4435718199469614, -1.115069871335524, -1.187123951611041, -0.7817742277681076, 0.8470548902504879, -0.9299984541383048, -0.5711688731414751, -1.196956107837709, 1.1101965120916275, -1.1735426993560893, 1.0271618904735131, -1.2978939987336149, -0.4252598362224527, -0.5878955693033913, 1.1326509803331775, -1.0000004146465058, 0.48997823096716364, -0.13982967560030857, 1.0736682726224174, -1.0000001625157806, 0.999999794697206, -0.8528041198514227, 0.6731406328782114};
inline constexpr double kSvcGamma = 0.3333333333333333;
inline constexpr double kPlattA = -2.015860968162179;
inline constexpr double kPlattB = -0.48336820045251955;
inline const std::vector<double> kGbtProba = {0.4784303307533264, 0.5267011523246765, 0.485866516828537, 0.659136950969696, 0.35138392448425293, 0.659136950969696, 0.5045079588890076, 0.492008775472641, 0.35138392448425293, 0.659136950969696, 0.35138392448425293, 0.45571190118789673, 0.35138392448425293, 0.6468190550804138, 0.45571190118789673, 0.659136950969696, 0.35138392448425293, 0.6215177178382874, 0.45571190118789673, 0.45571190118789673, 0.35138392448425293, 0.659136950969696, 0.45129910111427307, 0.4909179210662842, 0.35138392448425293, 0.659136950969696, 0.45571190118789673, 0.6468190550804138, 0.35138392448425293, 0.5045079588890076, 0.46370813250541687, 0.659136950969696, 0.45129910111427307, 0.6468190550804138, 0.485866516828537, 0.659136950969696, 0.35138392448425293, 0.659136950969696, 0.45571190118789673, 0.485866516828537};
inline const std::vector<double> kCkaX = {1.1176970354583304, 1.2961183320726692, 0.5856230948922269, -0.1705743326628547, -0.8276844022238058, 1.702123396645885, -0.663407493058731, -0.7662252991911512, 1.1471057046877435, -0.47006936400297344, 0.10325648380919117, -0.08792600978687724, 1.5608081992870613, 0.28661360097841887, -0.017305688406974017, 1.1868529797853313, 0.4420132531331617, -0.6160851501537105, -0.44841320018450115, -0.3609082633626268, -1.2079625855096634, 0.11319517827331932, -1.266519215099849, -1.2835969099380895, -2.9024588984841406, 1.7458100537607453, 1.4079688765465297, -0.5008527609354206, -1.8670632377620562, 1.0456395737375508, -2.240681290261177, -1.3212879384754561, -0.2743312290143455, -0.42565340686960396, 1.334566604566331, 0.775632458830048, -0.1996388574886564, 0.6442273109787492, 0.548572855767427, 1.2979394464776044};
inline const std::vector<double> kCkaY = {2.247194692202976, 2.3594363412403503, 0.5569158670481823, 5.158502773992927, 1.6661161355714547, 0.018434500379094887, -0.1370040982114411, 1.7620528386504144, -0.5507235102586083, -1.2282102537444826, 4.9056468120287935, 1.7053287239963364, 0.032042453493750844, 0.32674094136253984, -0.3721496470815821, 3.5737850223976344, -0.9610040257885069, -0.5840087393471849, 2.772633401478691, -5.275830035430262, -0.6291512369479582, 5.599474383266963, 1.0791762744598727, 1.208627420611022, -2.312522945435982, -3.6240802651190207, -0.7241351309242865, -1.2012759349005084, 0.31019632141988884, 1.4909686616596174};
inline constexpr double kCkaXY = 0.7642090115769502;
inline const std::vector<double> kCkaWideX = {0.33000499710725095, 0.8106746977062306, -0.5063753120207901, 0.5856225026258577, 0.8143799498241013, 2.6335755593354007, -0.8518212034424045, 1.8769984529274575, -0.9365931764009837, 0.23090909875000873, 0.07644041926621427, 0.9986851912754741, 1.424814753056384, -0.2239202911976282, 0.19296156501105446, -1.1993129289363813, 1.2461938307624094, 0.3688803529037049, -1.3602326938894176, -0.3521811276639959, -0.6954279908577816, -0.6075903822813986, 1.047898610856383, 2.075578783833185, -0.8650665507555273, -0.024027831752541588, 0.4438070837963601, 0.8557896235479435, 0.6911934403860306, 0.8609079130321149, -0.46924067431325983, -1.1369427537135337, -0.35401353605429503, -2.4888675079525533, 0.24273360372728142, 0.15504235901525107, -1.0041236895720758, -0.26868742472754387, -0.7620155760787147, 0.8639637204443459, 1.8691844930630308, -0.735915768984177, -0.39596076158891114, -0.6858747403902737, -0.6243646778592956, 1.2011043656736617, 1.147144639235341, 0.09875422062660172, 1.2091753882561427, -0.6463464509114127, -0.14262642588545357, 0.8449768152815038, -0.30632941662741364, 0.6154375038264562};
inline const std::vector<double> kCkaWideY = {0.3673648216411113, -0.10751303875205437, 1.1050193593728517, 0.4022076822213354, -0.4938268956389551, -0.5819951916720832, -0.17852250536163006, -0.020529436569641565, 0.8093185327599299, -0.27309101622930987, -1.0310376229688036, -0.570997680881872, 1.1490225844833117, -0.3133744985565512, 1.6291103720094142, -0.6795139310217655, -0.22550817813603646, -0.31876586071540103, 1.500730177995332, -1.9336820953932599, 0.2436546649639974, 1.8646922599953117, -1.9821934717275687, -0.12598924741541295, -0.7225403072480356, -0.9827483778660092, 0.36287540222872006, -1.051983617697917, -0.7370375189288197, 1.0269676489164055, -0.6524882115035563, -0.5558564734573836, -2.3959583642113436, 2.596586872837119, 0.3299803557615215, 1.2592363759534493, -0.32830419904780167, 0.5953189051640506, -0.3378977306190004, 2.4350287739372223, -0.9655184647232449, -2.3808160459466716, 0.3790220457158714, 0.7494073719660362, -0.8768739138314102, -0.15454920794946528, 1.1032492867723875, 1.067361301830985, -0.5894063383408222, 1.7028147835780203, 0.08960186762653218, 0.08667936973621852, -1.8509253513709338, -0.9577079135235423, -0.29056288208417375, 0.5928870450658448, -0.8795754069101257, -1.0014942299073661, -0.7276434189931796, 0.5250687103708339, 1.4095442302008343, 0.7383678590094985, -0.8089624250267287, 0.39324688956719445, 0.6746412756719775, 0.41123362495217564};
inline constexpr double kCkaWide = 0.7797241151249523;
inline const std::vector<double> kPcaX = {0.2973822628452726, 4.497947249948609, -1.5009503726684355, 0.7013048937999883, 0.07770758410095302, 1.1948474100905941, 0.9905672197457306, -1.4574528945529417, -0.31134661292191923, -0.1064456163857333, 0.10550078042089417, 4.363196545442055, -0.9078163611980963, 0.10779129795473927, -0.04634523487267917, 1.635354079839158, 2.746896927879252, -0.452156645497439, -0.06891601806042265, -0.020264219971832826, 2.6674442535051757, 0.958858655114777, 0.226893530282822, -0.40456446080126446, -0.05530279766193283, -1.8427914968621026, -2.2608007358411677, 0.06646098333644648, 1.2082736436693462, -0.00282948068933561, -0.06542634874995912, -1.844473452550969, -0.38289094717904615, -0.594268360029803, -0.04344801823791602, 1.5482383333068828, -2.3086089957799194, 0.22699714594451453, 0.9988130410416095, -0.012029975350863328};
inline const std::vector<double> kPcaEigenvalues = {8.382210575162716, 1.935385929719126, 0.3839532032829706, 0.18212963802321608, 0.0012887889086036263};
inline constexpr double kPcaPr = 1.5970629402519718;
inline const std::vector<double> kGramX = {0.7375347165501484, 0.23949057431058657, 1.0156554953709365, -0.37813079150184375, -0.8895658277226997, 0.45586160903253364, 0.21004314128911908, -0.0351089860819563, -1.3019101132033872, -0.06667550359405305, 1.743784658092066, -1.243858366654173, 0.3840300165140844, 0.27818810753666523, -0.15975256825883072, 1.6432538008621569, -0.23773912973621256, 0.802225113134321, 1.4004687600456467, 1.047352652258584, 0.1695700255993861, 2.187115406864109, 0.46054664798451295, 0.6559625846313527, 0.8251359782700243, -0.40910036846271924, 0.3526981492906673, -0.18456364375468182};
inline const std::vector<double> kGramEigenvalues = {2.88902065537037, 1.7088035256188567, 0.6690870161919558, 5.294607805040723e-16, 2.938720911160614e-17, 0.0, 0.0};
inline const std::vector<int> kPermBase0 = {0, 0, 0, 0, 0, 0, 0, 0};
inline const std::vector<int> kPermSteered0 = {1, 1, 1, 1, 1, 1, 0, 0};
inline constexpr double kPermP0 = 0.03125;
inline const std::vector<int> kPermBase1 = {1, 0, 1, 0, 1, 1, 0, 0, 1, 0};
inline const std::vector<int> kPermSteered1 = {1, 1, 1, 1, 0, 1, 1, 1, 1, 0};
inline constexpr double kPermP1 = 0.375;
inline const std::vector<int> kPermBase2 = {1, 1, 0, 1, 0, 0, 1, 0, 1};
inline const std::vector<int> kPermSteered2 = {0, 1, 1, 0, 1, 0, 0, 1, 0};
inline constexpr double kPermP2 = 1.0;
inline constexpr double kCkaNullMean200 = 0.20015281053583342;
inline constexpr double kCkaNullSd200 = 0.005812833547298716;
inline constexpr double kCkaNullBelow02 = 0.505;
inline constexpr double kCkaNullMean2000 = 0.024397621547100172;
inline constexpr double kCkaNullSd2000 = 0.0007135427431547946;

}  // namespace oracle

#pragma once

// Built-in evaluation phrases in the style of the standard text-entry phrase
// set: short, memorable, lowercase, letters and spaces only. Also the default
// language-model training corpus.

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace eyetype {

inline constexpr std::array<std::string_view, 264> kPhraseSet{
    "you must make an appointment",
    "my watch fell in the water",
    "prevailing wind from the east",
    "never too rich and never too thin",
    "breathing is difficult",
    "i can see the rings on saturn",
    "physics and chemistry are hard",
    "my bank account is overdrawn",
    "elections bring out the best",
    "we are having spaghetti",
    "time to go shopping",
    "a problem with the engine",
    "elephants are afraid of mice",
    "my favorite place to visit",
    "three two one zero blast off",
    "my favorite subject is psychology",
    "circumstances are unacceptable",
    "watch out for low flying objects",
    "if at first you do not succeed",
    "please provide your date of birth",
    "we run the risk of failure",
    "prayer in schools offends some",
    "he is just like everyone else",
    "great disturbance in the force",
    "love means many things",
    "you must be getting old",
    "the world is a stage",
    "can i skate with sister today",
    "neither a borrower nor a lender be",
    "one heck of a question",
    "question that must be answered",
    "beware the ides of march",
    "double double toil and trouble",
    "the power of denial",
    "i agree with you",
    "do not say anything",
    "play it again sam",
    "the force is with you",
    "you are not a jedi yet",
    "an offer you cannot refuse",
    "are you talking to me",
    "yes you are very smart",
    "all work and no play",
    "hair gel is very greasy",
    "valium in the economy size",
    "the facts get in the way",
    "the dreamers of dreams",
    "did you have a good time",
    "space is a high priority",
    "you are a wonderful example",
    "do not squander your time",
    "do not drink too much",
    "take a coffee break",
    "popularity is desired by all",
    "the music is better than it sounds",
    "starlight and dewdrop",
    "the living is easy",
    "fish are jumping",
    "the cotton is high",
    "drove my chevy to the levee",
    "but the levee was dry",
    "i took the rover from the shop",
    "movie about a nutty professor",
    "come and see our new car",
    "coming up with killer sound bites",
    "i am going to a music lesson",
    "the opposing team is over there",
    "soon we will return from the city",
    "i am wearing a tie and a jacket",
    "the quick brown fox jumped",
    "all together in one big pile",
    "wear a crown with many jewels",
    "there will be some fog tonight",
    "i am allergic to bees and peanuts",
    "he is still on our team",
    "the dow jones index has risen",
    "my preferred treat is chocolate",
    "the king sends you to the tower",
    "we are subjects and must obey",
    "mom made her a turtleneck",
    "goldilocks and the three bears",
    "we went grocery shopping",
    "the assignment is due today",
    "what you see is what you get",
    "for your information only",
    "a quarter of a century",
    "the store will close at ten",
    "head shoulders knees and toes",
    "vanilla flavored ice cream",
    "frequently asked questions",
    "round robin scheduling",
    "information super highway",
    "my favorite web browser",
    "the laser printer is jammed",
    "all good boys deserve fudge",
    "the second largest country",
    "call for more details",
    "just in time for the party",
    "have a good weekend",
    "video camera with a zoom lens",
    "what a monkey sees a monkey will do",
    "that is very unfortunate",
    "the back yard of our house",
    "this is a very good idea",
    "reading week is just about here",
    "our fax number has changed",
    "thank you for your help",
    "no exchange without a bill",
    "the early bird gets the worm",
    "buckle up for safety",
    "this is too much to handle",
    "protect your environment",
    "world population is growing",
    "the library is closed today",
    "mary had a little lamb",
    "teaching services will help",
    "we accept personal checks",
    "this is a non profit organization",
    "user friendly interface",
    "healthy food is good for you",
    "hands on experience with a job",
    "this watch is too expensive",
    "the postal service is very slow",
    "communicate through email",
    "the capital of our nation",
    "travel at the speed of light",
    "i do not fully agree with you",
    "gas bills are sent monthly",
    "earthquakes are predictable",
    "life is but a dream",
    "take it to the recycling depot",
    "sent this by registered mail",
    "fall is my favorite season",
    "a fox is a very smart animal",
    "the kids are very excited",
    "parking lot is full of trucks",
    "my bike has a flat tire",
    "do not walk too quickly",
    "a duck quacks to ask for food",
    "limited warranty of two years",
    "the four seasons will come",
    "the sun rises in the east",
    "it is very windy today",
    "do not worry about this",
    "dashing through the snow",
    "want to join us for lunch",
    "stay away from strangers",
    "accompanied by an adult",
    "see you later alligator",
    "make my day you sucker",
    "i can play much better now",
    "she wears too much makeup",
    "my bare face in the wind",
    "batman wears a cape",
    "i hate baking pies",
    "lydia wants to go home",
    "win first prize in the contest",
    "freud wrote of the ego",
    "i do not care if you do that",
    "always cover all the bases",
    "nobody cares anymore",
    "can we play cards tonight",
    "get rid of that immediately",
    "i watched blazing saddles",
    "the sum of the parts",
    "they love to yap about nothing",
    "peek out the window",
    "be home before midnight",
    "i skimmed through your proposal",
    "he was wearing a sweatshirt",
    "no more war no more bloodshed",
    "toss the ball around",
    "i will meet you at noon",
    "i want to hold your hand",
    "the children are playing",
    "superman never wore a mask",
    "i listen to the tape everyday",
    "he is shouting loudly",
    "correct your diction immediately",
    "seasoned golfers love the game",
    "he cooled off after she left",
    "my dog sheds his hair",
    "join us on the patio",
    "these cookies are so amazing",
    "i can still feel your presence",
    "the dog will bite you",
    "a most ridiculous thing",
    "where did you get that tie",
    "what a lovely red jacket",
    "do you like to shop on sunday",
    "i spilled coffee on the carpet",
    "the largest of the five oceans",
    "shall we play a round of cards",
    "olympic athletes use drugs",
    "my mother makes good cookies",
    "do a good deed to someone",
    "quick there is someone knocking",
    "flashing red light means stop",
    "sprawling subdivisions are bad",
    "where did i leave my glasses",
    "on the way to the cottage",
    "a lot of chlorine in the water",
    "do not drink the water",
    "my car always breaks in the winter",
    "santa claus got stuck",
    "public transit is much faster",
    "zero in on the facts",
    "make up a few more phrases",
    "my fingers are very cold",
    "rain rain go away",
    "bad for the environment",
    "universities are too expensive",
    "the price of gas is high",
    "the winner of the race",
    "we drive on parkways",
    "we park in driveways",
    "go out for some pizza and beer",
    "effort is what it will take",
    "where can my little dog be",
    "not quite so smart as you think",
    "do you like to go camping",
    "this person is a disaster",
    "the imagination of the nation",
    "universally understood to be wrong",
    "listen to five hours of opera",
    "an occasional taste of chocolate",
    "victims deserve more redress",
    "the protesters blocked all traffic",
    "the acceptance speech was boring",
    "work hard to reach the summit",
    "a little encouragement is needed",
    "stiff penalty for staying out late",
    "the pen is mightier than the sword",
    "exceed the maximum speed limit",
    "in sharp contrast to your words",
    "this leather jacket is too warm",
    "consequences of a wrong turn",
    "this mission statement is baloney",
    "you will lose your voice",
    "every apple from every tree",
    "are you sure you want this",
    "the fire blazed all weekend",
    "if diplomacy does not work",
    "please keep this confidential",
    "the rationale behind the decision",
    "the cat has a pleasant temperament",
    "our housekeeper does a thorough job",
    "her majesty visited our country",
    "handicapped persons need consideration",
    "these barracks are big enough",
    "sing the gospel and the blues",
    "he underestimated the opponent",
    "we must redouble our efforts",
    "the prince married the princess",
    "an airport is a very busy place",
    "the minimum amount of time",
    "the plug does not fit the socket",
    "thank you for the lovely gift",
    "the insulation is not working",
    "the generation gap gets wider",
    "the stock exchange dipped",
    "we are going to the movies",
    "the fourth edition was better",
    "my mother went to the market",
};

/// Built-in phrases whose length lies in [min_len, max_len].
inline std::vector<std::string> phrases_between(std::size_t min_len, std::size_t max_len) {
  std::vector<std::string> out;
  for (auto p : kPhraseSet)
    if (p.size() >= min_len && p.size() <= max_len) out.emplace_back(p);
  return out;
}

/// The built-in phrases joined one per line.
inline std::string phrase_corpus() {
  std::string out;
  for (auto p : kPhraseSet) {
    out += p;
    out += '\n';
  }
  return out;
}

}  // namespace eyetype
